#include "hfree/bench.hpp"
#include "hfree/cg.hpp"
#include "hfree/drivers.hpp"
#include "hfree/hessian_model.hpp"
#include "hfree/linesearch.hpp"
#include "hfree/newton_model.hpp"
#include "hfree/problems.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace hfree;

namespace {

SampleSet make_samples(const Vec& x, const std::vector<Vec>& points, const std::vector<double>& fvals,
                       const std::vector<Vec>& zvecs) {
    if (points.size() != fvals.size() || (!zvecs.empty() && zvecs.size() != points.size())) {
        throw InvalidArgument("points, fvals and zvecs must have matching lengths");
    }
    SampleSet s;
    s.center = x;
    for (std::size_t l = 0; l < points.size(); ++l) {
        SamplePoint pt{points[l], fvals[l], std::nullopt, 0};
        if (!zvecs.empty()) pt.z = zvecs[l];
        s.points.push_back(std::move(pt));
    }
    return s;
}

std::optional<SparsityPattern> to_pattern(int n, const std::optional<std::vector<std::pair<int, int>>>& pairs) {
    if (!pairs) return std::nullopt;
    return SparsityPattern(n, *pairs);
}

py::dict record_to_dict(const RunRecord& r) {
    py::dict d;
    d["problem"] = r.problem;
    d["n"] = r.n;
    d["method"] = r.method;
    d["seed"] = r.seed;
    d["status"] = to_string(r.status);
    d["iters"] = r.counters.n_iter;
    d["hvp"] = r.counters.n_hvp;
    d["fevals"] = r.counters.n_f;
    d["gevals"] = r.counters.n_grad;
    d["final_f"] = r.final_f;
    d["final_grad_norm"] = r.final_grad_norm;
    d["restarts"] = r.restarts;
    d["fallbacks"] = r.fallbacks;
    d["wall_ms"] = r.wall_ms;
    d["x"] = r.x;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = R"pbdoc(
        Hessian-free line-search methods built on interpolation models
        enriched with Hessian-vector products.
    )pbdoc";

    py::register_exception<SingularMatrix>(m, "SingularMatrix");
    py::register_exception<DegenerateGeometry>(m, "DegenerateGeometry");
    py::register_exception<ZeroGradient>(m, "ZeroGradient");
    py::register_exception<AscentDirection>(m, "AscentDirection");
    py::register_exception<EmptyInput>(m, "EmptyInput");

    m.def("unit_ball_sample", [](std::uint64_t seed, int n) {
        RngStream rng(seed);
        return unit_ball_sample(rng, n);
    }, py::arg("seed"), py::arg("n"));
    m.def("sym_from_alpha", &sym_from_alpha, py::arg("alpha"), py::arg("n"));
    m.def("alpha_from_sym", &alpha_from_sym, py::arg("h"));

    py::class_<ProblemDef>(m, "Problem")
        .def_readonly("name", &ProblemDef::name)
        .def_readonly("n", &ProblemDef::n)
        .def_readonly("x0", &ProblemDef::x0)
        .def_property_readonly("key", &ProblemDef::key)
        .def("f", [](const ProblemDef& p, const Vec& x) { return p.eval_f(x); })
        .def("grad", [](const ProblemDef& p, const Vec& x) { return p.eval_grad(x); })
        .def("hvp", [](const ProblemDef& p, const Vec& x, const Vec& v) { return p.eval_hvp(x, v); })
        .def_property_readonly("pattern", [](const ProblemDef& p) -> std::optional<std::vector<std::pair<int, int>>> {
            if (!p.pattern) return std::nullopt;
            return p.pattern->upper_pairs();
        })
        .def("__repr__", [](const ProblemDef& p) { return "<Problem " + p.key() + ">"; });

    m.def("problems", [] {
        std::vector<std::string> keys;
        for (const auto& p : registry()) keys.push_back(p.key());
        return keys;
    }, "Keys (NAME/n) of every built-in problem.");
    m.def("problem", &find_problem, py::return_value_policy::reference, py::arg("key"));
    m.def("problem_set", [](const std::string& name) {
        std::vector<std::string> keys;
        for (const ProblemDef* p : problem_set(name)) keys.push_back(p->key());
        return keys;
    }, py::arg("name"));
    m.def("fd_check", [](const std::string& key) {
        const ProblemDef& p = find_problem(key);
        const FdReport r = fd_check(p, p.x0);
        py::dict d;
        d["ok"] = r.ok();
        d["grad_rel_err"] = r.grad_rel_err;
        d["hvp_rel_err"] = r.hvp_rel_err;
        return d;
    }, py::arg("key"));

    m.def("solve", [](const std::string& key, const std::string& method, std::uint64_t seed, int max_iter,
                      double grad_tol, const std::string& force_rule, const std::string& safeguard) {
        SolverConfig cfg;
        cfg.method = parse_method(method);
        cfg.seed = seed;
        cfg.max_iter = max_iter;
        cfg.grad_tol = grad_tol;
        cfg.force_rule = ForceRule::parse(force_rule);
        cfg.safeguard = safeguard == "always" ? SafeguardMode::always : SafeguardMode::deficit;
        RunRecord rec;
        {
            py::gil_scoped_release release;
            rec = run(find_problem(key), cfg);
        }
        return record_to_dict(rec);
    }, py::arg("problem"), py::arg("method") = "inexact_newton", py::arg("seed") = 1, py::arg("max_iter") = 2000,
       py::arg("grad_tol") = 1e-5, py::arg("force_rule") = "sqrt", py::arg("safeguard") = "deficit",
       "Run one method on a registered problem; returns the run record as a dict.");

    m.def("recover_hessian", [](const Vec& x, const Vec& grad, double f, const std::vector<Vec>& points,
                                const std::vector<double>& fvals, const Vec& v, const Vec& w,
                                const std::optional<std::vector<std::pair<int, int>>>& pattern,
                                const std::optional<Vec>& alpha_prev, bool frobenius) {
        const auto n = static_cast<int>(x.size());
        const EnrichedSystem sys = assemble(x, grad, f, make_samples(x, points, fvals, {}), v, w,
                                            to_pattern(n, pattern));
        if (sys.m.rows() == sys.m.cols() && !alpha_prev) {
            return solve_determined(sys).h;
        }
        const Vec prev = alpha_prev ? *alpha_prev : Vec::Zero(sys.m.cols());
        return solve_least_change(sys, prev, frobenius ? ChangeNorm::frobenius : ChangeNorm::alpha).h;
    }, py::arg("x"), py::arg("grad"), py::arg("f"), py::arg("points"), py::arg("fvals"), py::arg("v"), py::arg("w"),
       py::arg("pattern") = py::none(), py::arg("alpha_prev") = py::none(), py::arg("frobenius") = false,
       "Model Hessian from interpolation values plus one Hessian-vector product.");

    m.def("recover_newton_direction", [](const Vec& x, double f, const std::vector<Vec>& points,
                                         const std::vector<double>& fvals, const std::vector<Vec>& zvecs,
                                         const std::optional<Vec>& d_prev) {
        const NewtonConditions c = build_conditions(x, f, make_samples(x, points, fvals, zvecs));
        return solve_newton(c.z, c.rhs, d_prev ? *d_prev : Vec::Zero(x.size()));
    }, py::arg("x"), py::arg("f"), py::arg("points"), py::arg("fvals"), py::arg("zvecs"),
       py::arg("d_prev") = py::none());

    m.def("correct_z", &correct_z, py::arg("z_prev"), py::arg("grad_prev"), py::arg("grad_cur"));
    m.def("descent_safeguard", [](const Vec& d, const Vec& g, double eta, const std::string& mode) {
        return descent_safeguard(d, g, eta, mode == "always" ? SafeguardMode::always : SafeguardMode::deficit);
    }, py::arg("d"), py::arg("g"), py::arg("eta") = kDefaultEta, py::arg("mode") = "deficit");

    m.def("truncated_cg", [](const DenseMat& a, const Vec& g, double force, int max_iter) {
        const CgResult r = truncated_cg([&](const Vec& v) -> Vec { return a * v; }, g, force, max_iter);
        const char* exit = r.exit == CgExit::converged ? "converged"
                           : r.exit == CgExit::negative_curvature ? "negative_curvature" : "max_iter";
        return py::make_tuple(r.d, r.iters, exit);
    }, py::arg("a"), py::arg("g"), py::arg("force"), py::arg("max_iter"));

    m.def("cubic_search", [](const std::function<double(double)>& phi, double phi0, double dphi0) {
        const LineSearchResult r = cubic_search(phi, phi0, dphi0);
        return py::make_tuple(r.alpha, r.f_new, r.n_feval,
                              r.status == LineSearchStatus::success ? "success" : "step_too_small");
    }, py::arg("phi"), py::arg("phi0"), py::arg("dphi0"));

    m.def("performance_profile", [](const std::vector<std::vector<double>>& t, const std::vector<std::string>& solvers,
                                    const std::optional<std::vector<double>>& taus) {
        const auto grid = taus ? *taus : bench::tau_grid(t);
        py::dict out;
        for (const auto& c : bench::performance_profile(t, solvers, grid)) {
            out[py::str(c.solver)] = py::make_tuple(c.taus, c.rho);
        }
        return out;
    }, py::arg("t"), py::arg("solvers"), py::arg("taus") = py::none(),
       "Performance profiles; returns {solver: (taus, rho)}. Use float('inf') for failures.");

#ifdef VERSION_INFO
    m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}
