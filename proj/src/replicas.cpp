#include "brw/replicas.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "brw/errors.hpp"
#include "brw/parallel.hpp"

namespace brw {

std::vector<std::vector<double>> sample_overlap_array(const PartitionTable& table,
                                                      int n,
                                                      const SplitMix64& gen,
                                                      std::uint64_t block) {
    if (n < 1 || n > 64) throw DomainError("replica count must lie in [1, 64]");
    std::vector<NodeRef> leaves(n);
    const std::uint64_t base = block * static_cast<std::uint64_t>(n);
    for (int i = 0; i < n; ++i)
        leaves[i] = table.sample_leaf(gen, base + static_cast<std::uint64_t>(i));
    std::vector<std::vector<double>> r(n, std::vector<double>(n, 1.0));
    const double depth = static_cast<double>(table.depth());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double o = lca_depth(leaves[i], leaves[j]) / depth;
            r[i][j] = r[j][i] = o;
        }
    return r;
}

OverlapFunction OverlapFunction::parse(const std::string& text, int n) {
    if (n < 1) throw DomainError("replica count must be >= 1");
    OverlapFunction f;
    f.text = text;
    if (text == "1") {
        f.kind = Kind::one;
        return f;
    }
    if (text.rfind("pattern:", 0) == 0) {
        f.kind = Kind::pattern;
        f.pattern = Pattern::parse(text.substr(8));
        if (f.pattern.n != n)
            throw DomainError("pattern covers " + std::to_string(f.pattern.n) +
                              " replicas, expected " + std::to_string(n));
        return f;
    }
    f.kind = Kind::monomial;
    std::size_t pos = 0;
    while (pos < text.size()) {
        if (text[pos] != 'R')
            throw DomainError("cannot parse overlap function '" + text + "'");
        ++pos;
        auto digit = [&](const char* what) {
            if (pos >= text.size() ||
                !std::isdigit(static_cast<unsigned char>(text[pos])))
                throw DomainError("expected " + std::string(what) + " in '" +
                                  text + "'");
            return text[pos++] - '0';
        };
        const int i = digit("replica index");
        const int j = digit("replica index");
        int power = 1;
        if (pos < text.size() && text[pos] == '^') {
            ++pos;
            power = digit("exponent");
        }
        if (i < 1 || j < 1 || i == j)
            throw DomainError("overlap pair indices must be distinct and "
                              "positive in '" + text + "'");
        if (i > n || j > n)
            throw DomainError("overlap pair (" + std::to_string(i) + "," +
                              std::to_string(j) + ") exceeds replica count " +
                              std::to_string(n));
        if (power < 1 || power > 8)
            throw DomainError("exponent must lie in [1, 8] in '" + text + "'");
        f.factors.push_back({std::min(i, j), std::max(i, j), power});
        if (pos < text.size()) {
            if (text[pos] != '*')
                throw DomainError("expected '*' between factors in '" + text +
                                  "'");
            ++pos;
        }
    }
    if (f.factors.empty())
        throw DomainError("empty overlap function '" + text + "'");
    return f;
}

double OverlapFunction::eval(const std::vector<std::vector<double>>& overlaps,
                             double cutoff) const {
    switch (kind) {
        case Kind::one:
            return 1.0;
        case Kind::monomial: {
            double v = 1.0;
            for (const auto& [i, j, power] : factors)
                v *= std::pow(overlaps[i - 1][j - 1], power);
            return v;
        }
        case Kind::pattern: {
            const int n = pattern.n;
            std::vector<std::vector<double>> sub(n, std::vector<double>(n));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) sub[i][j] = overlaps[i][j];
            return Pattern::from_overlaps(sub, cutoff) == pattern ? 1.0 : 0.0;
        }
    }
    return 0.0;
}

bool OverlapFunction::exact_capable() const {
    return kind == Kind::one ||
           (kind == Kind::monomial && factors.size() == 1);
}

namespace {

IbpResult assemble_ibp(int depth, double beta,
                       const std::vector<std::pair<double, double>>& sides) {
    IbpResult out;
    out.depth = depth;
    out.beta = beta;
    std::vector<double> lhs(sides.size()), rhs(sides.size()), diff(sides.size());
    for (std::size_t i = 0; i < sides.size(); ++i) {
        lhs[i] = sides[i].first;
        rhs[i] = sides[i].second;
        diff[i] = lhs[i] - rhs[i];
    }
    out.lhs = mean_se(lhs);
    out.rhs = mean_se(rhs);
    out.diff = mean_se(diff);
    double lo = lhs[0], hi = lhs[0];
    for (double v : lhs) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    out.degenerate = (hi - lo) <= 1e-12 * (1.0 + std::abs(out.lhs.mean));
    return out;
}

} // namespace

IbpResult ibp_check(int depth, double beta, std::size_t replicates,
                    std::uint64_t seed, unsigned threads) {
    if (!(beta > 0.0))
        throw DomainError("energy-overlap comparison needs beta > 0");
    if (replicates < 2) throw DomainError("need at least 2 replicates");
    GibbsParams{depth, beta, 0}.validate();
    const std::function<std::pair<double, double>(std::size_t)> one =
        [&](std::size_t r) {
            const auto table =
                PartitionTable::build({depth, beta, derive_seed(seed, r)});
            const double lhs = table.mean_energy() /
                               (beta * static_cast<double>(depth));
            const double rhs = 1.0 - overlap_law_exact(table).mean();
            return std::make_pair(lhs, rhs);
        };
    return assemble_ibp(depth, beta,
                        parallel_map<std::pair<double, double>>(replicates, one,
                                                                threads));
}

IbpResult ibp_check_tables(const std::vector<PartitionTable>& tables) {
    if (tables.size() < 2) throw DomainError("need at least 2 tables");
    const int depth = tables.front().depth();
    const double beta = tables.front().beta();
    if (!(beta > 0.0))
        throw DomainError("energy-overlap comparison needs beta > 0");
    std::vector<std::pair<double, double>> sides;
    sides.reserve(tables.size());
    for (const auto& t : tables) {
        if (t.depth() != depth || t.beta() != beta)
            throw DomainError("tables must share depth and beta");
        sides.emplace_back(t.mean_energy() / (beta * depth),
                           1.0 - overlap_law_exact(t).mean());
    }
    return assemble_ibp(depth, beta, sides);
}

FdResult fd_derivative_check(int depth, const std::vector<double>& betas,
                             double step, std::size_t replicates,
                             std::uint64_t seed, unsigned threads) {
    if (betas.size() < 3)
        throw DomainError("temperature grid needs at least 3 points");
    if (!(step > 0.0)) throw DomainError("step must be positive");
    for (double b : betas) {
        GibbsParams{depth, b, 0}.validate();
        if (b - step < 0.0)
            throw DomainError("step crosses beta = 0 at grid point " +
                              std::to_string(b));
    }
    if (replicates < 2) throw DomainError("need at least 2 replicates");

    FdResult out;
    out.depth = depth;
    out.step = step;
    out.replicates = replicates;

    // One disorder seed drives every grid point and both offsets.
    struct Row {
        std::vector<double> fd, direct;
    };
    const std::function<Row(std::size_t)> one = [&](std::size_t r) {
        const std::uint64_t s = derive_seed(seed, r);
        Row row;
        row.fd.reserve(betas.size());
        row.direct.reserve(betas.size());
        for (double b : betas) {
            const double up = log_partition_streaming({depth, b + step, s});
            const double dn = log_partition_streaming({depth, b - step, s});
            row.fd.push_back((up - dn) /
                             (2.0 * step * static_cast<double>(depth)));
            const auto table = PartitionTable::build({depth, b, s});
            row.direct.push_back(b * (1.0 - overlap_law_exact(table).mean()));
        }
        return row;
    };
    const auto rows = parallel_map<Row>(replicates, one, threads);

    for (std::size_t bi = 0; bi < betas.size(); ++bi) {
        FdPoint point;
        point.beta = betas[bi];
        std::vector<double> fd(replicates), direct(replicates), diff(replicates);
        for (std::size_t r = 0; r < replicates; ++r) {
            fd[r] = rows[r].fd[bi];
            direct[r] = rows[r].direct[bi];
            diff[r] = fd[r] - direct[r];
        }
        point.fd = mean_se(fd).mean;
        point.direct = mean_se(direct).mean;
        point.diff = mean_se(diff);
        out.points.push_back(point);
    }
    return out;
}

void GgiOptions::validate() const {
    GibbsParams{depth, beta, 0}.validate();
    if (batches < 2) throw DomainError("need at least 2 disorder batches");
    if (disorders < batches)
        throw DomainError("need at least one disorder per batch");
    if (!(cutoff > 0.0) || cutoff > 1.0)
        throw DomainError("cutoff must lie in (0, 1]");
}

namespace {

// Everything one disorder contributes to the residual assembly.
struct DisorderRow {
    std::vector<double> moments;              // E<R12^o>, index o-1
    std::vector<double> mixed;                // E<R12^a R13^p> per pair
    std::vector<std::array<double, 3>> mc;    // coupled, f, cross per MC spec
};

struct PlannedSpec {
    GgiSpec spec;
    OverlapFunction f;
    bool exact = false;
    int a = 0;             // monomial power
    bool pair_has_one = false;
    int mixed_slot = -1;   // index into DisorderRow::mixed
    int mc_slot = -1;      // index into DisorderRow::mc
};

} // namespace

std::vector<GgiResult> ggi_residual_batch(const std::vector<GgiSpec>& specs,
                                          const GgiOptions& options) {
    options.validate();
    if (specs.empty()) throw DomainError("no replica combinations requested");

    std::vector<PlannedSpec> plan;
    std::vector<std::pair<int, int>> mixed_pairs;
    int max_order = 1;
    int mc_replicas = 0;
    for (const auto& spec : specs) {
        if (spec.n < 2 || spec.n > 12)
            throw DomainError("replica count n must lie in [2, 12]");
        if (spec.p < 1 || spec.p > 8)
            throw DomainError("overlap power p must lie in [1, 8]");
        PlannedSpec ps;
        ps.spec = spec;
        ps.f = OverlapFunction::parse(spec.f, spec.n);
        max_order = std::max(max_order, spec.p);
        if (ps.f.exact_capable()) {
            ps.exact = true;
            if (ps.f.kind == OverlapFunction::Kind::monomial) {
                const auto& [i, j, power] = ps.f.factors.front();
                (void)j;
                ps.a = power;
                ps.pair_has_one = i == 1;
                max_order = std::max(max_order, ps.a + spec.p);
                const std::pair<int, int> key{ps.a, spec.p};
                auto it = std::find(mixed_pairs.begin(), mixed_pairs.end(), key);
                if (it == mixed_pairs.end()) {
                    mixed_pairs.push_back(key);
                    ps.mixed_slot = static_cast<int>(mixed_pairs.size()) - 1;
                } else {
                    ps.mixed_slot =
                        static_cast<int>(it - mixed_pairs.begin());
                }
            }
        } else {
            if (options.draws < 8)
                throw DomainError("sampled path needs draws >= 8");
            ps.mc_slot = mc_replicas++;
        }
        plan.push_back(std::move(ps));
    }
    int draw_width = 0;
    for (const auto& ps : plan)
        if (ps.mc_slot >= 0) draw_width = std::max(draw_width, ps.spec.n + 1);

    const std::function<DisorderRow(std::size_t)> one = [&](std::size_t r) {
        const std::uint64_t s = derive_seed(options.seed, r);
        const auto table =
            PartitionTable::build({options.depth, options.beta, s});
        const auto law = overlap_law_exact(table);
        DisorderRow row;
        row.moments.resize(max_order);
        for (int o = 1; o <= max_order; ++o)
            row.moments[o - 1] = law.moment(o);
        row.mixed.reserve(mixed_pairs.size());
        for (const auto& [a, p] : mixed_pairs)
            row.mixed.push_back(table.mixed_overlap_moment(a, p));
        if (draw_width > 0) {
            row.mc.assign(static_cast<std::size_t>(mc_replicas),
                          {0.0, 0.0, 0.0});
            const SplitMix64 gen(derive_seed(s, 0x52455031ULL));
            for (std::size_t t = 0; t < options.draws; ++t) {
                const auto overlaps =
                    sample_overlap_array(table, draw_width, gen, t);
                for (const auto& ps : plan) {
                    if (ps.mc_slot < 0) continue;
                    const int n = ps.spec.n;
                    const double fv = ps.f.eval(overlaps, options.cutoff);
                    auto& acc = row.mc[static_cast<std::size_t>(ps.mc_slot)];
                    acc[0] += fv * std::pow(overlaps[0][n], ps.spec.p);
                    acc[1] += fv;
                    double cross = 0.0;
                    for (int k = 2; k <= n; ++k)
                        cross += fv * std::pow(overlaps[0][k - 1], ps.spec.p);
                    acc[2] += cross;
                }
            }
            for (auto& acc : row.mc)
                for (double& v : acc) v /= static_cast<double>(options.draws);
        }
        return row;
    };
    const auto rows =
        parallel_map<DisorderRow>(options.disorders, one, options.threads);

    // Per-spec per-disorder terms, then batch-mean assembly.
    std::vector<GgiResult> results;
    results.reserve(plan.size());
    for (const auto& ps : plan) {
        const int n = ps.spec.n;
        const int p = ps.spec.p;
        std::vector<double> coupled(rows.size()), fterm(rows.size()),
            cross(rows.size()), pair_moment(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const auto& row = rows[r];
            pair_moment[r] = row.moments[p - 1];
            if (ps.mc_slot >= 0) {
                const auto& acc = row.mc[static_cast<std::size_t>(ps.mc_slot)];
                coupled[r] = acc[0];
                fterm[r] = acc[1];
                cross[r] = acc[2];
            } else if (ps.f.kind == OverlapFunction::Kind::one) {
                coupled[r] = row.moments[p - 1];
                fterm[r] = 1.0;
                cross[r] = (n - 1) * row.moments[p - 1];
            } else {
                const double ma = row.moments[ps.a - 1];
                const double map = row.moments[ps.a + p - 1];
                const double mx =
                    row.mixed[static_cast<std::size_t>(ps.mixed_slot)];
                fterm[r] = ma;
                if (ps.pair_has_one) {
                    coupled[r] = mx;
                    cross[r] = map + (n - 2) * mx;
                } else {
                    coupled[r] = ma * row.moments[p - 1];
                    cross[r] = 2.0 * mx + (n - 3) * ma * row.moments[p - 1];
                }
            }
        }
        auto assemble = [&](std::size_t lo, std::size_t hi) {
            double c = 0, f = 0, x = 0, m = 0;
            for (std::size_t r = lo; r < hi; ++r) {
                c += coupled[r];
                f += fterm[r];
                x += cross[r];
                m += pair_moment[r];
            }
            const double len = static_cast<double>(hi - lo);
            c /= len; f /= len; x /= len; m /= len;
            return std::array<double, 2>{c, (f * m + x) / n};
        };
        GgiResult res;
        res.spec = ps.spec;
        res.depth = options.depth;
        res.beta = options.beta;
        res.exact = ps.mc_slot < 0;
        res.disorders = options.disorders;
        const auto full = assemble(0, rows.size());
        res.coupled = full[0];
        res.decoupled = full[1];
        std::vector<double> batch_res(options.batches);
        for (std::size_t b = 0; b < options.batches; ++b) {
            const std::size_t lo = rows.size() * b / options.batches;
            const std::size_t hi = rows.size() * (b + 1) / options.batches;
            const auto part = assemble(lo, hi);
            batch_res[b] = part[0] - part[1];
        }
        res.residual = mean_se(batch_res);
        res.residual.mean = res.coupled - res.decoupled;
        res.residual.n = options.disorders;
        res.per_disorder.resize(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r)
            res.per_disorder[r] = {coupled[r], fterm[r], cross[r],
                                   pair_moment[r]};
        results.push_back(std::move(res));
    }
    return results;
}

GgiResult ggi_residual(const GgiSpec& spec, const GgiOptions& options) {
    return ggi_residual_batch({spec}, options).front();
}

Estimate tree_pattern_prob(const PartitionTable& table, const Pattern& pattern,
                           std::size_t draws, std::uint64_t seed, double cutoff,
                           std::size_t batches) {
    if (pattern.n < 1) throw DomainError("empty pattern");
    if (batches < 2 || draws < batches)
        throw DomainError("need at least one draw per batch, batches >= 2");
    if (!(cutoff > 0.0) || cutoff > 1.0)
        throw DomainError("cutoff must lie in (0, 1]");
    std::vector<double> hits(draws);
    for (std::size_t t = 0; t < draws; ++t) {
        const SplitMix64 gen(derive_seed(seed, t));
        const auto overlaps = sample_overlap_array(table, pattern.n, gen, 0);
        hits[t] =
            Pattern::from_overlaps(overlaps, cutoff) == pattern ? 1.0 : 0.0;
    }
    return batched_mean_se(hits, batches);
}

} // namespace brw
