#include "brw/field.hpp"

// Header-only for now; the translation unit anchors the target and keeps
// room for out-of-line additions without touching the build.
namespace brw {}
