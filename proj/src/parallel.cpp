#include "brw/parallel.hpp"

namespace brw {}
