#include "hfree/drivers.hpp"

#include "hfree/hessian_model.hpp"
#include "hfree/linesearch.hpp"
#include "hfree/sampling.hpp"

#include <chrono>
#include <cmath>

namespace hfree {

std::string to_string(Method m) {
    switch (m) {
        case Method::inexact_newton: return "inexact_newton";
        case Method::hessian_model: return "hessian_model";
        case Method::hessian_model_sparse: return "hessian_model_sparse";
        case Method::newton_model: return "newton_model";
    }
    return "unknown";
}

Method parse_method(const std::string& text) {
    for (Method m : {Method::inexact_newton, Method::hessian_model, Method::hessian_model_sparse,
                     Method::newton_model}) {
        if (to_string(m) == text) return m;
    }
    throw InvalidArgument("unknown method '" + text + "'");
}

std::string to_string(RunStatus s) {
    switch (s) {
        case RunStatus::converged: return "converged";
        case RunStatus::max_iter: return "max_iter";
        case RunStatus::linesearch_failure: return "linesearch_failure";
        case RunStatus::numeric_failure: return "numeric_failure";
        case RunStatus::time_limit: return "time_limit";
    }
    return "unknown";
}

RunStatus parse_status(const std::string& text) {
    for (RunStatus s : {RunStatus::converged, RunStatus::max_iter, RunStatus::linesearch_failure,
                        RunStatus::numeric_failure, RunStatus::time_limit}) {
        if (to_string(s) == text) return s;
    }
    throw InvalidArgument("unknown run status '" + text + "'");
}

namespace {

RngStream run_stream(const ProblemDef& p, const SolverConfig& cfg) {
    return RngStream::derive(cfg.seed, p.key() + "/" + to_string(cfg.method));
}

class InexactNewton final : public DirectionStrategy {
public:
    explicit InexactNewton(const SolverConfig& cfg) : cfg_(cfg) {}

    Direction next(Oracle& oracle, const IterateView& it) override {
        const auto n = static_cast<int>(it.x.size());
        const CgResult cg = truncated_cg([&](const Vec& v) { return oracle.hess_vec(it.x, v); }, it.g,
                                         cfg_.force_rule(it.g.norm()), n);
        return {cg.d, cg.iters, false};
    }

private:
    SolverConfig cfg_;
};

class HessianModelStrategy final : public DirectionStrategy {
public:
    HessianModelStrategy(const ProblemDef& p, const SolverConfig& cfg, bool sparse)
        : cfg_(cfg), rng_(run_stream(p, cfg)) {
        if (sparse) {
            pattern_ = p.pattern ? *p.pattern : SparsityPattern::dense(p.n);
        }
        dirs_ = fixed_directions(rng_, p.n, interpolation_count(p, sparse));
    }

    Direction next(Oracle& oracle, const IterateView& it) override {
        const double r = it.k == 0 ? kRadiusMax : radius(it.x, it.x_prev);
        SampleSet s;
        s.center = it.x;
        s.points.reserve(dirs_.y_dirs.size());
        for (const Vec& y : dirs_.y_dirs) {
            SamplePoint pt{it.x + r * y, std::nullopt, std::nullopt, 0};
            pt.fval = oracle.value(pt.y);
            s.points.push_back(std::move(pt));
        }
        const Vec v = r * dirs_.v_dir;
        const Vec w = oracle.hess_vec(it.x, v);
        HessianModel model;
        try {
            model = solve_determined(assemble(it.x, it.g, it.f, s, v, w, pattern_));
        } catch (const SingularMatrix&) {
            return {-it.g, 0, true};
        }
        if (!model.h.allFinite()) {
            return {-it.g, 0, true};
        }
        const auto n = static_cast<int>(it.x.size());
        const CgResult cg =
            truncated_cg([&](const Vec& u) -> Vec { return model.h * u; }, it.g, cfg_.force_rule(it.g.norm()), n);
        return {cg.d, cg.iters, false};
    }

private:
    SolverConfig cfg_;
    RngStream rng_;
    std::optional<SparsityPattern> pattern_;
    FixedDirections dirs_;
};

class NewtonModelStrategy final : public DirectionStrategy {
public:
    NewtonModelStrategy(const ProblemDef& p, const SolverConfig& cfg) : cfg_(cfg), rng_(run_stream(p, cfg)) {
        (void)p;
    }

    Direction next(Oracle& oracle, const IterateView& it) override {
        const auto n = static_cast<int>(it.x.size());
        bool rebuilt = false;
        if (it.k == 0) {
            rebuild(oracle, it.x, kRadiusMax);
            rebuilt = true;
        } else {
            const double r = radius(it.x, it.x_prev);
            for (SamplePoint& pt : samples_.points) {
                pt.z = correct_z(*pt.z, g_prev_, it.g);
            }
            samples_ = replace_farthest(std::move(samples_), it.x, r, rng_);
            fill_pending(oracle, it.x);
            if (maybe_restart(current_model(it.x, it.f), cfg_.cond_restart)) {
                rebuild(oracle, it.x, r);
                rebuilt = true;
                ++restarts_;
            }
        }
        g_prev_ = it.g;

        Vec dn;
        try {
            const NewtonConditions c = build_conditions(it.x, it.f, samples_);
            dn = solve_newton(c.z, c.rhs, Vec::Zero(n));
        } catch (const SingularMatrix&) {
            if (!rebuilt) {
                rebuild(oracle, it.x, radius(it.x, it.x_prev));
                ++restarts_;
                try {
                    const NewtonConditions c = build_conditions(it.x, it.f, samples_);
                    dn = solve_newton(c.z, c.rhs, Vec::Zero(n));
                } catch (const SingularMatrix&) {
                }
            }
        }
        if (dn.size() != n || !dn.allFinite()) {
            return {-it.g, 0, true};
        }
        return {descent_safeguard(dn, it.g, cfg_.eta, cfg_.safeguard), 0, false};
    }

    int restarts() const override { return restarts_; }

private:
    void rebuild(Oracle& oracle, const Vec& x, double r) {
        samples_ = sample_ball(x, r, static_cast<int>(x.size()), rng_);
        fill_pending(oracle, x);
    }

    void fill_pending(Oracle& oracle, const Vec& x) {
        for (SamplePoint& pt : samples_.points) {
            if (!pt.fval) {
                pt.fval = oracle.value(pt.y);
                pt.z = oracle.hess_vec(x, pt.y - x);
            }
        }
    }

    NewtonModel current_model(const Vec& x, double f) const {
        NewtonModel m;
        const NewtonConditions c = build_conditions(x, f, samples_);
        m.z = c.z;
        m.rhs = c.rhs;
        m.cond_z = scaled_condition(c.z);
        return m;
    }

    SolverConfig cfg_;
    RngStream rng_;
    SampleSet samples_;
    Vec g_prev_;
    int restarts_ = 0;
};

}  // namespace

int interpolation_count(const ProblemDef& p, bool sparse) {
    const int unknowns = sparse && p.pattern ? static_cast<int>(p.pattern->nnz()) : alpha_size(p.n);
    const int count = unknowns - p.n;
    if (count < 0) {
        throw InvalidArgument("interpolation_count: pattern has fewer entries than the dimension");
    }
    return count;
}

std::unique_ptr<DirectionStrategy> make_inexact_newton(const SolverConfig& cfg) {
    return std::make_unique<InexactNewton>(cfg);
}

std::unique_ptr<DirectionStrategy> make_hessian_model(const ProblemDef& p, const SolverConfig& cfg, bool sparse) {
    return std::make_unique<HessianModelStrategy>(p, cfg, sparse);
}

std::unique_ptr<DirectionStrategy> make_newton_model(const ProblemDef& p, const SolverConfig& cfg) {
    return std::make_unique<NewtonModelStrategy>(p, cfg);
}

RunRecord run_line_search(const ProblemDef& p, const SolverConfig& cfg, DirectionStrategy& strategy,
                          const std::string& method_name) {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    auto elapsed_s = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

    RunRecord rec;
    rec.problem = p.name;
    rec.n = p.n;
    rec.method = method_name;
    rec.seed = cfg.seed;

    Oracle oracle(p);
    Vec x = p.x0;
    Vec x_prev = x;
    double f = oracle.value(x);
    Vec g = oracle.gradient(x);
    LineSearchOptions ls_opt;
    ls_opt.c1 = cfg.c1;
    ls_opt.min_step = cfg.min_step;

    rec.status = RunStatus::max_iter;
    for (int k = 0;; ++k) {
        if (!std::isfinite(f) || !g.allFinite()) {
            rec.status = RunStatus::numeric_failure;
            break;
        }
        if (g.norm() < cfg.grad_tol) {
            rec.status = RunStatus::converged;
            break;
        }
        if (k >= cfg.max_iter) {
            rec.status = RunStatus::max_iter;
            break;
        }
        if (elapsed_s() > cfg.wall_limit_s) {
            rec.status = RunStatus::time_limit;
            break;
        }

        Direction dir = strategy.next(oracle, IterateView{k, x, x_prev, f, g});
        double slope = g.dot(dir.d);
        if (!dir.d.allFinite() || !(slope < 0.0)) {
            dir = Direction{-g, dir.inner_iters, true};
            slope = -g.squaredNorm();
        }
        if (dir.fallback) {
            ++rec.fallbacks;
        }

        const Vec d = dir.d;
        const LineSearchResult ls =
            cubic_search([&](double a) { return oracle.value(x + a * d); }, f, slope, ls_opt);
        if (ls.status != LineSearchStatus::success) {
            rec.status = RunStatus::linesearch_failure;
            break;
        }
        x_prev = x;
        x += ls.alpha * d;
        f = ls.f_new;
        g = oracle.gradient(x);
        ++oracle.counters().n_iter;
        if (cfg.trace) {
            rec.trace.push_back({k + 1, f, g.norm(), ls.alpha, dir.inner_iters, oracle.counters().n_hvp});
        }
    }

    rec.counters = oracle.counters();
    rec.final_f = f;
    rec.final_grad_norm = g.norm();
    rec.restarts = strategy.restarts();
    rec.x = x;
    rec.wall_ms = 1e3 * elapsed_s();
    return rec;
}

RunRecord run_inexact_newton(const ProblemDef& p, const SolverConfig& cfg) {
    SolverConfig c = cfg;
    c.method = Method::inexact_newton;
    auto s = make_inexact_newton(c);
    return run_line_search(p, c, *s, to_string(c.method));
}

RunRecord run_hessian_model(const ProblemDef& p, const SolverConfig& cfg, bool sparse) {
    SolverConfig c = cfg;
    c.method = sparse ? Method::hessian_model_sparse : Method::hessian_model;
    auto s = make_hessian_model(p, c, sparse);
    return run_line_search(p, c, *s, to_string(c.method));
}

RunRecord run_newton_model(const ProblemDef& p, const SolverConfig& cfg) {
    SolverConfig c = cfg;
    c.method = Method::newton_model;
    auto s = make_newton_model(p, c);
    return run_line_search(p, c, *s, to_string(c.method));
}

RunRecord run(const ProblemDef& p, const SolverConfig& cfg) {
    switch (cfg.method) {
        case Method::inexact_newton: return run_inexact_newton(p, cfg);
        case Method::hessian_model: return run_hessian_model(p, cfg, false);
        case Method::hessian_model_sparse: return run_hessian_model(p, cfg, true);
        case Method::newton_model: return run_newton_model(p, cfg);
    }
    throw InvalidArgument("run: unknown method");
}

}  // namespace hfree
