#include "brw/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <functional>

#include "brw/barrier.hpp"
#include "brw/cascade.hpp"
#include "brw/errors.hpp"
#include "brw/gibbs.hpp"
#include "brw/parallel.hpp"
#include "brw/replicas.hpp"
#include "brw/stats.hpp"

namespace brw {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

void check_keys(const ConfigMap& cfg,
                std::initializer_list<const char*> specific) {
    static const char* common[] = {"experiment", "seed", "threads", "out"};
    std::vector<std::string> unknown;
    for (const auto& key : cfg.keys()) {
        bool ok = false;
        for (const char* c : common) ok = ok || key == c;
        for (const char* c : specific) ok = ok || key == c;
        if (!ok) unknown.push_back(key);
    }
    if (!unknown.empty()) {
        std::string msg = "unknown keys for experiment '" +
                          cfg.get_string("experiment") + "':";
        for (const auto& k : unknown) msg += " " + k;
        throw ValidationError(msg);
    }
}

struct Common {
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::optional<double> budget;
};

Common read_common(const ConfigMap& cfg, bool budget_allowed = false) {
    Common c;
    c.seed = cfg.get_uint("seed", 1);
    const std::uint64_t threads = cfg.get_uint("threads", 1);
    if (threads < 1 || threads > 256)
        throw ValidationError("key 'threads' must lie in [1, 256]");
    c.threads = static_cast<unsigned>(threads);
    if (budget_allowed && cfg.has("time_budget_seconds")) {
        const double b = cfg.get_double("time_budget_seconds");
        if (!(b > 0.0))
            throw ValidationError("key 'time_budget_seconds' must be positive");
        c.budget = b;
    }
    return c;
}

// Runs fn over [0, count) in chunks of 16 replicates; stops at a chunk
// boundary once the wall-clock budget is spent. Returns the completed
// prefix and whether the run was cut short.
template <typename T>
std::pair<std::vector<T>, bool> budgeted_map(
    std::size_t count, const std::function<T(std::size_t)>& fn,
    unsigned threads, const std::optional<double>& budget) {
    if (!budget) return {parallel_map<T>(count, fn, threads), false};
    const auto start = std::chrono::steady_clock::now();
    std::vector<T> out;
    out.reserve(count);
    std::size_t done = 0;
    while (done < count) {
        const std::size_t take = std::min<std::size_t>(16, count - done);
        const std::function<T(std::size_t)> shifted =
            [&](std::size_t i) { return fn(done + i); };
        auto part = parallel_map<T>(take, shifted, threads);
        for (auto& v : part) out.push_back(std::move(v));
        done += take;
        const std::chrono::duration<double> elapsed =
            std::chrono::steady_clock::now() - start;
        if (elapsed.count() > *budget && done < count) return {out, true};
    }
    return {out, false};
}

ordered_json estimate_json(const Estimate& e) {
    return ordered_json{{"mean", e.mean}, {"se", e.se}, {"n", e.n}};
}

ordered_json base_summary(const std::string& id) {
    ordered_json s;
    s["experiment"] = id;
    s["version"] = kVersion;
    return s;
}

int read_depth(const ConfigMap& cfg) {
    const long long d = cfg.get_int("depth");
    if (d < 1 || d > kMaxDepth)
        throw ValidationError("key 'depth' must lie in [1, " +
                              std::to_string(kMaxDepth) + "]");
    return static_cast<int>(d);
}

std::size_t read_count(const ConfigMap& cfg, const char* key,
                       long long lo = 2) {
    const long long v = cfg.get_int(key);
    if (v < lo)
        throw ValidationError("key '" + std::string(key) +
                              "' must be >= " + std::to_string(lo));
    return static_cast<std::size_t>(v);
}

ResultRecord run_free_energy(const ConfigMap& cfg) {
    check_keys(cfg, {"depth", "beta", "replicates", "time_budget_seconds"});
    const Common c = read_common(cfg, true);
    const int depth = read_depth(cfg);
    const double beta = cfg.get_double("beta");
    const std::size_t replicates = read_count(cfg, "replicates");
    GibbsParams{depth, beta, 0}.validate();

    const std::function<double(std::size_t)> one = [&](std::size_t r) {
        return log_partition_streaming({depth, beta, derive_seed(c.seed, r)}) /
               static_cast<double>(depth);
    };
    const auto [values, incomplete] =
        budgeted_map<double>(replicates, one, c.threads, c.budget);

    ResultRecord rec;
    rec.experiment = "free-energy";
    rec.header = {"replicate", "seed", "log_partition_over_depth"};
    for (std::size_t r = 0; r < values.size(); ++r)
        rec.rows.push_back({std::to_string(r),
                            std::to_string(derive_seed(c.seed, r)),
                            format_double(values[r])});
    rec.summary = base_summary("free-energy");
    rec.summary["depth"] = depth;
    rec.summary["beta"] = beta;
    rec.summary["replicates"] = replicates;
    rec.summary["completed"] = values.size();
    rec.summary["incomplete"] = incomplete;
    if (values.size() >= 2) {
        const Estimate e = mean_se(values);
        rec.summary["free_energy"] = estimate_json(e);
        rec.summary["limit"] = free_energy_limit(beta);
        rec.summary["gap_to_limit"] = e.mean - free_energy_limit(beta);
    }
    return rec;
}

ResultRecord run_overlap_law(const ConfigMap& cfg) {
    check_keys(cfg, {"depth", "beta", "replicates", "time_budget_seconds"});
    const Common c = read_common(cfg, true);
    const int depth = read_depth(cfg);
    const double beta = cfg.get_double("beta");
    const std::size_t replicates = read_count(cfg, "replicates");
    GibbsParams{depth, beta, 0}.validate();

    const std::function<OverlapLaw(std::size_t)> one = [&](std::size_t r) {
        const auto table =
            PartitionTable::build({depth, beta, derive_seed(c.seed, r)});
        return overlap_law_exact(table);
    };
    const auto [laws, incomplete] =
        budgeted_map<OverlapLaw>(replicates, one, c.threads, c.budget);

    ResultRecord rec;
    rec.experiment = "overlap-law";
    rec.header = {"replicate", "seed",     "mean_overlap",
                  "mass_low",  "mass_mid", "mass_high"};
    std::vector<double> means, lows, mids, highs;
    for (std::size_t r = 0; r < laws.size(); ++r) {
        const auto& law = laws[r];
        means.push_back(law.mean());
        lows.push_back(law.mass_low());
        mids.push_back(law.mass_mid());
        highs.push_back(law.mass_high());
        rec.rows.push_back({std::to_string(r),
                            std::to_string(derive_seed(c.seed, r)),
                            format_double(means.back()),
                            format_double(lows.back()),
                            format_double(mids.back()),
                            format_double(highs.back())});
    }
    rec.summary = base_summary("overlap-law");
    rec.summary["depth"] = depth;
    rec.summary["beta"] = beta;
    rec.summary["replicates"] = replicates;
    rec.summary["completed"] = laws.size();
    rec.summary["incomplete"] = incomplete;
    if (laws.size() >= 2) {
        rec.summary["mean_overlap"] = estimate_json(mean_se(means));
        rec.summary["mass_low"] = estimate_json(mean_se(lows));
        rec.summary["mass_mid"] = estimate_json(mean_se(mids));
        rec.summary["mass_high"] = estimate_json(mean_se(highs));
    }
    return rec;
}

ResultRecord run_ibp(const ConfigMap& cfg) {
    check_keys(cfg, {"depth", "beta", "replicates", "time_budget_seconds"});
    const Common c = read_common(cfg, true);
    const int depth = read_depth(cfg);
    const double beta = cfg.get_double("beta");
    if (!(beta > 0.0))
        throw ValidationError("key 'beta' must be positive for this check");
    const std::size_t replicates = read_count(cfg, "replicates");
    GibbsParams{depth, beta, 0}.validate();

    const std::function<std::pair<double, double>(std::size_t)> one =
        [&](std::size_t r) {
            const auto table =
                PartitionTable::build({depth, beta, derive_seed(c.seed, r)});
            const double lhs = table.mean_energy() /
                               (beta * static_cast<double>(depth));
            const double rhs = 1.0 - overlap_law_exact(table).mean();
            return std::make_pair(lhs, rhs);
        };
    const auto [sides, incomplete] = budgeted_map<std::pair<double, double>>(
        replicates, one, c.threads, c.budget);

    ResultRecord rec;
    rec.experiment = "ibp";
    rec.header = {"replicate", "seed", "lhs", "rhs", "diff"};
    std::vector<double> lhs, rhs, diff;
    for (std::size_t r = 0; r < sides.size(); ++r) {
        lhs.push_back(sides[r].first);
        rhs.push_back(sides[r].second);
        diff.push_back(lhs.back() - rhs.back());
        rec.rows.push_back({std::to_string(r),
                            std::to_string(derive_seed(c.seed, r)),
                            format_double(lhs.back()),
                            format_double(rhs.back()),
                            format_double(diff.back())});
    }
    rec.summary = base_summary("ibp");
    rec.summary["depth"] = depth;
    rec.summary["beta"] = beta;
    rec.summary["replicates"] = replicates;
    rec.summary["completed"] = sides.size();
    rec.summary["incomplete"] = incomplete;
    if (sides.size() >= 2) {
        const Estimate d = mean_se(diff);
        rec.summary["lhs"] = estimate_json(mean_se(lhs));
        rec.summary["rhs"] = estimate_json(mean_se(rhs));
        rec.summary["diff"] = estimate_json(d);
        rec.summary["abs_z"] =
            d.se > 0.0 ? std::abs(d.mean) / d.se : (d.mean == 0.0 ? 0.0 : 1e300);
        double lo = lhs[0], hi = lhs[0];
        for (double v : lhs) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        rec.summary["degenerate"] =
            (hi - lo) <= 1e-12 * (1.0 + std::abs(mean_se(lhs).mean));
    }
    return rec;
}

ResultRecord run_fd_derivative(const ConfigMap& cfg) {
    check_keys(cfg, {"depth", "beta_lo", "beta_hi", "beta_points", "step",
                     "replicates"});
    const Common c = read_common(cfg);
    const int depth = read_depth(cfg);
    const double lo = cfg.get_double("beta_lo");
    const double hi = cfg.get_double("beta_hi");
    const long long points = cfg.get_int("beta_points");
    if (points < 3)
        throw ValidationError("key 'beta_points' must be >= 3");
    if (!(lo <= hi)) throw ValidationError("beta_lo must be <= beta_hi");
    const double step = cfg.get_double("step");
    const std::size_t replicates = read_count(cfg, "replicates");
    std::vector<double> betas(points);
    for (long long i = 0; i < points; ++i)
        betas[i] = lo + (hi - lo) * static_cast<double>(i) /
                            static_cast<double>(points - 1);

    const FdResult res =
        fd_derivative_check(depth, betas, step, replicates, c.seed, c.threads);

    ResultRecord rec;
    rec.experiment = "fd-derivative";
    rec.header = {"beta", "fd", "direct", "diff", "diff_se"};
    double max_z = 0.0;
    ordered_json points_json = ordered_json::array();
    for (const auto& p : res.points) {
        rec.rows.push_back({format_double(p.beta), format_double(p.fd),
                            format_double(p.direct),
                            format_double(p.diff.mean),
                            format_double(p.diff.se)});
        const double z =
            p.diff.se > 0.0 ? std::abs(p.diff.mean) / p.diff.se : 0.0;
        max_z = std::max(max_z, z);
        points_json.push_back(ordered_json{{"beta", p.beta},
                                           {"fd", p.fd},
                                           {"direct", p.direct},
                                           {"diff", estimate_json(p.diff)},
                                           {"abs_z", z}});
    }
    rec.summary = base_summary("fd-derivative");
    rec.summary["depth"] = depth;
    rec.summary["step"] = step;
    rec.summary["replicates"] = replicates;
    rec.summary["points"] = points_json;
    rec.summary["max_abs_z"] = max_z;
    return rec;
}

ResultRecord run_ggi(const ConfigMap& cfg) {
    check_keys(cfg, {"depth", "beta", "disorders", "draws", "n", "p", "f",
                     "cutoff", "batches"});
    const Common c = read_common(cfg);
    GgiOptions opt;
    opt.depth = read_depth(cfg);
    opt.beta = cfg.get_double("beta");
    opt.disorders = read_count(cfg, "disorders");
    opt.draws = static_cast<std::size_t>(cfg.get_int("draws", 128));
    opt.seed = c.seed;
    opt.threads = c.threads;
    opt.batches = static_cast<std::size_t>(cfg.get_int("batches", 20));
    opt.cutoff = cfg.get_double("cutoff", 0.5);
    GgiSpec spec;
    spec.n = static_cast<int>(cfg.get_int("n"));
    spec.p = static_cast<int>(cfg.get_int("p"));
    spec.f = cfg.get_string("f", "1");

    const GgiResult res = ggi_residual(spec, opt);

    ResultRecord rec;
    rec.experiment = "ggi";
    rec.header = {"disorder", "seed", "coupled", "f_mean", "cross_sum",
                  "pair_moment"};
    for (std::size_t r = 0; r < res.per_disorder.size(); ++r) {
        const auto& row = res.per_disorder[r];
        rec.rows.push_back({std::to_string(r),
                            std::to_string(derive_seed(opt.seed, r)),
                            format_double(row[0]), format_double(row[1]),
                            format_double(row[2]), format_double(row[3])});
    }
    rec.summary = base_summary("ggi");
    rec.summary["depth"] = opt.depth;
    rec.summary["beta"] = opt.beta;
    rec.summary["n"] = spec.n;
    rec.summary["p"] = spec.p;
    rec.summary["f"] = spec.f;
    rec.summary["disorders"] = opt.disorders;
    rec.summary["exact"] = res.exact;
    rec.summary["coupled"] = res.coupled;
    rec.summary["decoupled"] = res.decoupled;
    rec.summary["residual"] = estimate_json(res.residual);
    return rec;
}

ResultRecord run_rpc_compare(const ConfigMap& cfg) {
    check_keys(cfg,
               {"theta", "n", "realizations", "tail_tol", "max_atoms",
                "batches"});
    const Common c = read_common(cfg);
    PdParams pd;
    pd.theta = cfg.get_double("theta");
    pd.tail_tol = cfg.get_double("tail_tol", 1e-4);
    pd.max_atoms = static_cast<std::size_t>(cfg.get_int("max_atoms", 200000));
    pd.validate();
    const int n = static_cast<int>(cfg.get_int("n"));
    const std::size_t realizations = read_count(cfg, "realizations");
    const std::size_t batches =
        static_cast<std::size_t>(cfg.get_int("batches", 20));

    const PatternCensus census =
        rpc_pattern_census(pd, n, realizations, c.seed, c.threads, batches);
    const double mu1 = 1.0 - pd.theta;

    ResultRecord rec;
    rec.experiment = "rpc-compare";
    rec.header = {"pattern", "exact", "estimate", "se", "z"};
    double max_z = 0.0, total_exact = 0.0, total_est = 0.0;
    for (std::size_t i = 0; i < census.patterns.size(); ++i) {
        const double exact = pattern_prob(census.patterns[i], mu1);
        const Estimate& e = census.probs[i];
        const double z = e.se > 0.0 ? (e.mean - exact) / e.se : 0.0;
        max_z = std::max(max_z, std::abs(z));
        total_exact += exact;
        total_est += e.mean;
        rec.rows.push_back({census.patterns[i].to_string(),
                            format_double(exact), format_double(e.mean),
                            format_double(e.se), format_double(z)});
    }
    rec.summary = base_summary("rpc-compare");
    rec.summary["theta"] = pd.theta;
    rec.summary["n"] = n;
    rec.summary["realizations"] = realizations;
    rec.summary["patterns"] = census.patterns.size();
    rec.summary["max_abs_z"] = max_z;
    rec.summary["total_exact"] = total_exact;
    rec.summary["total_estimate"] = total_est;
    return rec;
}

ResultRecord run_cluster_weights(const ConfigMap& cfg) {
    check_keys(cfg,
               {"depth", "beta", "epsilon", "replicates",
                "time_budget_seconds"});
    const Common c = read_common(cfg, true);
    const int depth = read_depth(cfg);
    const double beta = cfg.get_double("beta");
    const double epsilon = cfg.get_double("epsilon");
    const std::size_t replicates = read_count(cfg, "replicates");
    GibbsParams{depth, beta, 0}.validate();
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw ValidationError("key 'epsilon' must lie in (0, 1)");

    const std::function<ClusterWeights(std::size_t)> one = [&](std::size_t r) {
        const auto table =
            PartitionTable::build({depth, beta, derive_seed(c.seed, r)});
        return cluster_weights(table, epsilon);
    };
    const auto [all, incomplete] =
        budgeted_map<ClusterWeights>(replicates, one, c.threads, c.budget);

    ResultRecord rec;
    rec.experiment = "cluster-weights";
    rec.header = {"replicate", "seed", "clusters", "sum_sq",
                  "w1",        "w2",   "w3",       "w4"};
    std::vector<double> sums;
    for (std::size_t r = 0; r < all.size(); ++r) {
        const auto& cw = all[r];
        sums.push_back(cw.sum_sq());
        std::vector<std::string> row{std::to_string(r),
                                     std::to_string(derive_seed(c.seed, r)),
                                     std::to_string(cw.weights.size()),
                                     format_double(sums.back())};
        for (int k = 0; k < 4; ++k)
            row.push_back(format_double(
                k < static_cast<int>(cw.weights.size()) ? cw.weights[k] : 0.0));
        rec.rows.push_back(std::move(row));
    }
    rec.summary = base_summary("cluster-weights");
    rec.summary["depth"] = depth;
    rec.summary["beta"] = beta;
    rec.summary["epsilon"] = epsilon;
    if (!all.empty()) rec.summary["cut_depth"] = all.front().cut_depth;
    rec.summary["replicates"] = replicates;
    rec.summary["completed"] = all.size();
    rec.summary["incomplete"] = incomplete;
    if (all.size() >= 2) {
        rec.summary["sum_sq"] = estimate_json(mean_se(sums));
        const double theta = std::min(1.0, kBetaCritical / beta);
        rec.summary["predicted_sum_sq"] = 1.0 - theta;
    }
    return rec;
}

ResultRecord run_ballot(const ConfigMap& cfg) {
    check_keys(cfg,
               {"steps_list", "start", "window_lo", "window_hi", "samples"});
    const Common c = read_common(cfg);
    const auto steps_list = cfg.get_int_list("steps_list");
    BallotParams base;
    base.start = static_cast<int>(cfg.get_int("start"));
    base.window_lo = static_cast<int>(cfg.get_int("window_lo"));
    base.window_hi = static_cast<int>(cfg.get_int("window_hi"));
    const std::size_t samples = read_count(cfg, "samples", 100);

    ResultRecord rec;
    rec.experiment = "ballot";
    rec.header = {"steps", "estimate", "se", "samples", "hits"};
    std::vector<double> log_n, log_p;
    for (std::size_t i = 0; i < steps_list.size(); ++i) {
        BallotParams p = base;
        p.steps = static_cast<int>(steps_list[i]);
        p.validate();
        const McEstimate e =
            ballot_estimate(p, samples, derive_seed(c.seed, i), c.threads);
        rec.rows.push_back({std::to_string(p.steps), format_double(e.estimate),
                            format_double(e.se), std::to_string(e.samples),
                            std::to_string(e.hits)});
        if (e.hits > 0) {
            log_n.push_back(std::log(static_cast<double>(p.steps)));
            log_p.push_back(std::log(e.estimate));
        }
    }
    rec.summary = base_summary("ballot");
    rec.summary["start"] = base.start;
    rec.summary["window_lo"] = base.window_lo;
    rec.summary["window_hi"] = base.window_hi;
    rec.summary["samples"] = samples;
    if (log_n.size() >= 2) {
        const LineFit fit = fit_line(log_n, log_p);
        rec.summary["slope"] = fit.slope;
        rec.summary["intercept"] = fit.intercept;
        rec.summary["r2"] = fit.r2;
    }
    return rec;
}

ResultRecord run_tilted_barrier(const ConfigMap& cfg) {
    check_keys(cfg, {"steps_list", "start", "drift", "offset", "window_lo",
                     "window_hi", "samples", "samples_direct", "method"});
    const Common c = read_common(cfg);
    const auto steps_list = cfg.get_int_list("steps_list");
    WalkParams base;
    base.start = cfg.get_double("start");
    base.drift = cfg.get_double("drift");
    base.offset = cfg.get_double("offset");
    base.window_lo = cfg.get_double("window_lo");
    base.window_hi = cfg.get_double("window_hi");
    const std::size_t samples = read_count(cfg, "samples", 100);
    const std::size_t samples_direct = static_cast<std::size_t>(
        cfg.get_int("samples_direct", static_cast<long long>(samples)));
    const std::string method = cfg.get_string("method", "both");
    if (method != "direct" && method != "tilted" && method != "both")
        throw ValidationError("key 'method' must be direct, tilted or both");

    ResultRecord rec;
    rec.experiment = "tilted-barrier";
    rec.header = {"steps", "method",  "estimate", "se",
                  "samples", "hits", "unreliable"};
    ordered_json compare = ordered_json::array();
    std::vector<double> log_t, log_norm;
    for (std::size_t i = 0; i < steps_list.size(); ++i) {
        WalkParams p = base;
        p.steps = static_cast<int>(steps_list[i]);
        p.validate();
        McEstimate direct, tilted;
        if (method != "tilted") {
            direct = barrier_estimate(p, samples_direct, BarrierMethod::direct,
                                      derive_seed(c.seed, 2 * i), c.threads);
            rec.rows.push_back({std::to_string(p.steps), "direct",
                                format_double(direct.estimate),
                                format_double(direct.se),
                                std::to_string(direct.samples),
                                std::to_string(direct.hits),
                                direct.unreliable ? "1" : "0"});
        }
        if (method != "direct") {
            tilted = barrier_estimate(p, samples, BarrierMethod::tilted,
                                      derive_seed(c.seed, 2 * i + 1),
                                      c.threads);
            rec.rows.push_back({std::to_string(p.steps), "tilted",
                                format_double(tilted.estimate),
                                format_double(tilted.se),
                                std::to_string(tilted.samples),
                                std::to_string(tilted.hits),
                                tilted.unreliable ? "1" : "0"});
            if (tilted.estimate > 0.0) {
                // Peel off the exponential factors; what remains should
                // decay polynomially in the horizon.
                const double norm =
                    std::log(tilted.estimate) +
                    0.5 * p.steps * p.drift * p.drift +
                    p.drift * (p.window_lo - p.start);
                log_t.push_back(std::log(static_cast<double>(p.steps)));
                log_norm.push_back(norm);
            }
        }
        if (method == "both") {
            const double cse = std::sqrt(direct.se * direct.se +
                                         tilted.se * tilted.se);
            const double z = cse > 0.0
                                 ? (direct.estimate - tilted.estimate) / cse
                                 : 0.0;
            compare.push_back(
                ordered_json{{"steps", p.steps},
                             {"direct", direct.estimate},
                             {"tilted", tilted.estimate},
                             {"combined_se", cse},
                             {"z", z},
                             {"direct_unreliable", direct.unreliable}});
        }
    }
    rec.summary = base_summary("tilted-barrier");
    rec.summary["start"] = base.start;
    rec.summary["drift"] = base.drift;
    rec.summary["offset"] = base.offset;
    rec.summary["window_lo"] = base.window_lo;
    rec.summary["window_hi"] = base.window_hi;
    rec.summary["method"] = method;
    if (method == "both") rec.summary["comparison"] = compare;
    if (log_t.size() >= 2) {
        const LineFit fit = fit_line(log_t, log_norm);
        rec.summary["normalized_slope"] = fit.slope;
        rec.summary["normalized_r2"] = fit.r2;
    }
    return rec;
}

ResultRecord run_gamma_event(const ConfigMap& cfg) {
    check_keys(cfg,
               {"depth_list", "kappa", "replicates", "time_budget_seconds"});
    const Common c = read_common(cfg, true);
    const auto depth_list = cfg.get_int_list("depth_list");
    const double kappa = cfg.get_double("kappa");
    const std::size_t replicates = read_count(cfg, "replicates");

    ResultRecord rec;
    rec.experiment = "gamma-event";
    rec.header = {"depth", "estimate", "se",        "samples",
                  "hits",  "unreliable", "upper99"};
    ordered_json levels = ordered_json::array();
    std::vector<McEstimate> estimates;
    for (std::size_t i = 0; i < depth_list.size(); ++i) {
        GammaParams p;
        p.depth = static_cast<int>(depth_list[i]);
        p.kappa = kappa;
        p.validate();
        const McEstimate e = gamma_event_estimate(p, replicates,
                                                  derive_seed(c.seed, i),
                                                  c.threads);
        estimates.push_back(e);
        const std::string upper =
            e.hits == 0
                ? format_double(zero_count_upper_bound(e.samples, 0.99))
                : "";
        rec.rows.push_back({std::to_string(p.depth), format_double(e.estimate),
                            format_double(e.se), std::to_string(e.samples),
                            std::to_string(e.hits),
                            e.unreliable ? "1" : "0", upper});
        levels.push_back(ordered_json{{"depth", p.depth},
                                      {"estimate", e.estimate},
                                      {"se", e.se},
                                      {"hits", e.hits}});
    }
    rec.summary = base_summary("gamma-event");
    rec.summary["kappa"] = kappa;
    rec.summary["replicates"] = replicates;
    rec.summary["levels"] = levels;
    bool monotone = true;
    for (std::size_t i = 1; i < estimates.size(); ++i) {
        const double cse = std::sqrt(estimates[i - 1].se * estimates[i - 1].se +
                                     estimates[i].se * estimates[i].se);
        if (estimates[i].estimate >
            estimates[i - 1].estimate + 2.0 * cse + 1e-15)
            monotone = false;
    }
    rec.summary["non_increasing_within_2se"] = monotone;
    return rec;
}

ResultRecord run_leader(const ConfigMap& cfg) {
    check_keys(cfg, {"depth_list", "replicates", "time_budget_seconds"});
    const Common c = read_common(cfg, true);
    const auto depth_list = cfg.get_int_list("depth_list");
    const std::size_t replicates = read_count(cfg, "replicates");

    ResultRecord rec;
    rec.experiment = "leader";
    rec.header = {"depth", "replicate", "seed", "gap"};
    ordered_json levels = ordered_json::array();
    std::vector<double> depths, sds, medians;
    bool incomplete = false;
    for (std::size_t i = 0; i < depth_list.size(); ++i) {
        const int depth = static_cast<int>(depth_list[i]);
        FieldParams{depth, 0}.validate();
        const std::uint64_t level_seed = derive_seed(c.seed, i);
        const std::function<double(std::size_t)> one = [&](std::size_t r) {
            const IncrementOracle field({depth, derive_seed(level_seed, r)});
            return leader_max_streaming(field) - leader_centering(depth);
        };
        const auto [gaps, cut] =
            budgeted_map<double>(replicates, one, c.threads, c.budget);
        incomplete = incomplete || cut;
        for (std::size_t r = 0; r < gaps.size(); ++r)
            rec.rows.push_back({std::to_string(depth), std::to_string(r),
                                std::to_string(derive_seed(level_seed, r)),
                                format_double(gaps[r])});
        if (gaps.size() >= 2) {
            const Estimate e = mean_se(gaps);
            const double med = median(gaps);
            const double sd =
                e.se * std::sqrt(static_cast<double>(gaps.size()));
            depths.push_back(depth);
            sds.push_back(sd);
            medians.push_back(med);
            levels.push_back(ordered_json{{"depth", depth},
                                          {"median", med},
                                          {"mean", e.mean},
                                          {"se", e.se},
                                          {"sd", sd}});
        }
    }
    rec.summary = base_summary("leader");
    rec.summary["replicates"] = replicates;
    rec.summary["incomplete"] = incomplete;
    rec.summary["levels"] = levels;
    if (medians.size() >= 2) {
        double lo = medians[0], hi = medians[0];
        for (double m : medians) {
            lo = std::min(lo, m);
            hi = std::max(hi, m);
        }
        rec.summary["median_span"] = hi - lo;
        rec.summary["sd_slope"] = fit_line(depths, sds).slope;
    }
    return rec;
}

} // namespace

ResultRecord run_experiment(const ConfigMap& config,
                            const RunOverrides& overrides) {
    ConfigMap cfg = config;
    if (overrides.depth) cfg.set("depth", std::to_string(*overrides.depth));
    if (overrides.beta) cfg.set("beta", format_double(*overrides.beta));
    if (overrides.replicates)
        cfg.set("replicates", std::to_string(*overrides.replicates));
    if (overrides.seed) cfg.set("seed", std::to_string(*overrides.seed));
    if (overrides.threads)
        cfg.set("threads", std::to_string(*overrides.threads));

    const std::string id = cfg.get_string("experiment");
    using Runner = ResultRecord (*)(const ConfigMap&);
    static const std::pair<const char*, Runner> table[] = {
        {"free-energy", run_free_energy},
        {"overlap-law", run_overlap_law},
        {"ibp", run_ibp},
        {"fd-derivative", run_fd_derivative},
        {"ggi", run_ggi},
        {"rpc-compare", run_rpc_compare},
        {"cluster-weights", run_cluster_weights},
        {"ballot", run_ballot},
        {"tilted-barrier", run_tilted_barrier},
        {"gamma-event", run_gamma_event},
        {"leader", run_leader},
    };
    for (const auto& [name, runner] : table) {
        if (id == name) {
            const auto t0 = std::chrono::steady_clock::now();
            ResultRecord rec = runner(cfg);
            const std::chrono::duration<double> dt =
                std::chrono::steady_clock::now() - t0;
            rec.summary["runtime_seconds"] = dt.count();
            return rec;
        }
    }
    std::string known;
    for (const auto& [name, runner] : table) {
        (void)runner;
        if (!known.empty()) known += ", ";
        known += name;
    }
    throw ValidationError("unknown experiment '" + id + "'; known: " + known);
}

nlohmann::ordered_json summarize(const std::vector<ResultRecord>& records) {
    if (records.empty()) throw DomainError("no records to summarize");
    const std::string& id = records.front().experiment;
    for (const auto& r : records)
        if (r.experiment != id)
            throw DomainError("records mix experiments '" + id + "' and '" +
                              r.experiment + "'");
    if (records.size() == 1) return records.front().summary;

    ordered_json out;
    out["experiment"] = id;
    out["records"] = ordered_json::array();
    for (const auto& r : records) out["records"].push_back(r.summary);

    if (id == "free-energy") {
        // Order by depth and report the trend against the limit.
        std::vector<std::pair<int, double>> by_depth;
        bool below = true;
        for (const auto& r : records) {
            if (!r.summary.contains("free_energy")) continue;
            const double mean = r.summary["free_energy"]["mean"].get<double>();
            by_depth.emplace_back(r.summary["depth"].get<int>(), mean);
            below = below && mean < r.summary["limit"].get<double>();
        }
        std::sort(by_depth.begin(), by_depth.end());
        bool increasing = by_depth.size() >= 2;
        for (std::size_t i = 1; i < by_depth.size(); ++i)
            increasing = increasing && by_depth[i].second > by_depth[i - 1].second;
        out["strictly_increasing"] = increasing;
        out["all_below_limit"] = below;
    }
    return out;
}

void write_csv(const ResultRecord& record, std::ostream& out) {
    auto field = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        q += '"';
        return q;
    };
    for (std::size_t i = 0; i < record.header.size(); ++i) {
        if (i) out << ',';
        out << field(record.header[i]);
    }
    out << '\n';
    for (const auto& row : record.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << field(row[i]);
        }
        out << '\n';
    }
}

} // namespace brw
