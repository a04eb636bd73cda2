#include "hfree/problems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>

namespace hfree {

namespace {

// Objectives are written as a constant plus a sum of element functions, each
// depending on a handful of variables. Gradients and Hessian-vector products
// are scattered from the element derivatives, so the global Hessian is never
// formed and the structural sparsity pattern falls out of the element supports.

using ElementFn = std::function<void(const Vec& u, double& f, Vec& g, DenseMat& h)>;

struct Element {
    std::vector<int> vars;
    ElementFn fn;
};

struct ElementSum {
    double constant = 0.0;
    std::vector<Element> elements;
};

struct D1 {
    double f, g, h;
};

struct D2 {
    double f, ga, gb, haa, hab, hbb;
};

Element unary(int i, std::function<D1(double)> fn) {
    return {{i}, [fn = std::move(fn)](const Vec& u, double& f, Vec& g, DenseMat& h) {
                const D1 d = fn(u[0]);
                f = d.f;
                g[0] = d.g;
                h(0, 0) = d.h;
            }};
}

Element binary(int i, int j, std::function<D2(double, double)> fn) {
    return {{i, j}, [fn = std::move(fn)](const Vec& u, double& f, Vec& g, DenseMat& h) {
                const D2 d = fn(u[0], u[1]);
                f = d.f;
                g[0] = d.ga;
                g[1] = d.gb;
                h(0, 0) = d.haa;
                h(0, 1) = d.hab;
                h(1, 0) = d.hab;
                h(1, 1) = d.hbb;
            }};
}

struct Residual {
    double r;
    Vec grad;
    DenseMat hess;
};

// Sum of squared residuals over all variables, as a single element.
Element least_squares(int n, std::function<std::vector<Residual>(const Vec&)> residuals) {
    std::vector<int> vars(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        vars[static_cast<std::size_t>(i)] = i;
    }
    return {std::move(vars), [res = std::move(residuals)](const Vec& u, double& f, Vec& g, DenseMat& h) {
                f = 0.0;
                g.setZero();
                h.setZero();
                for (const Residual& r : res(u)) {
                    f += r.r * r.r;
                    g += 2.0 * r.r * r.grad;
                    h += 2.0 * (r.grad * r.grad.transpose() + r.r * r.hess);
                }
            }};
}

struct Scratch {
    Vec u, g, v;
    DenseMat h;
};

void eval_element(const Element& e, const Vec& x, Scratch& s, double& f) {
    const auto k = static_cast<Eigen::Index>(e.vars.size());
    s.u.resize(k);
    s.g.resize(k);
    s.h.resize(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
        s.u[a] = x[e.vars[static_cast<std::size_t>(a)]];
    }
    e.fn(s.u, f, s.g, s.h);
}

SparsityPattern pattern_of(int n, const ElementSum& sum) {
    std::vector<std::pair<int, int>> pairs;
    for (const Element& e : sum.elements) {
        for (int a : e.vars) {
            for (int b : e.vars) {
                if (a <= b) {
                    pairs.emplace_back(a, b);
                }
            }
        }
    }
    return SparsityPattern(n, std::move(pairs));
}

ProblemDef make_element_problem(std::string name, int n, Vec x0, ElementSum sum) {
    auto s = std::make_shared<const ElementSum>(std::move(sum));
    ProblemDef p;
    p.name = std::move(name);
    p.n = n;
    p.x0 = std::move(x0);
    p.pattern = pattern_of(n, *s);
    p.eval_f = [s](const Vec& x) {
        Scratch sc;
        double total = s->constant;
        for (const Element& e : s->elements) {
            double f = 0.0;
            eval_element(e, x, sc, f);
            total += f;
        }
        return total;
    };
    p.eval_grad = [s](const Vec& x) {
        Scratch sc;
        Vec g = Vec::Zero(x.size());
        for (const Element& e : s->elements) {
            double f = 0.0;
            eval_element(e, x, sc, f);
            for (std::size_t a = 0; a < e.vars.size(); ++a) {
                g[e.vars[a]] += sc.g[static_cast<Eigen::Index>(a)];
            }
        }
        return g;
    };
    p.eval_hvp = [s](const Vec& x, const Vec& v) {
        Scratch sc;
        Vec out = Vec::Zero(x.size());
        for (const Element& e : s->elements) {
            double f = 0.0;
            eval_element(e, x, sc, f);
            const auto k = static_cast<Eigen::Index>(e.vars.size());
            sc.v.resize(k);
            for (Eigen::Index a = 0; a < k; ++a) {
                sc.v[a] = v[e.vars[static_cast<std::size_t>(a)]];
            }
            const Vec hv = sc.h * sc.v;
            for (Eigen::Index a = 0; a < k; ++a) {
                out[e.vars[static_cast<std::size_t>(a)]] += hv[a];
            }
        }
        return out;
    };
    return p;
}

Vec constant_start(int n, double value) { return Vec::Constant(n, value); }

// ---------------------------------------------------------------------------
// Problem definitions, following the CUTEst SIF formulations.

ProblemDef arwhead(int n) {
    ElementSum s;
    const int last = n - 1;
    for (int i = 0; i < last; ++i) {
        s.elements.push_back(binary(i, last, [](double a, double b) {
            const double q = a * a + b * b;
            return D2{-4.0 * a + 3.0 + q * q, -4.0 + 4.0 * q * a, 4.0 * q * b,
                      4.0 * q + 8.0 * a * a, 8.0 * a * b, 4.0 * q + 8.0 * b * b};
        }));
    }
    return make_element_problem("ARWHEAD", n, constant_start(n, 1.0), std::move(s));
}

ProblemDef beale() {
    ElementSum s;
    s.elements.push_back(least_squares(2, [](const Vec& x) {
        static constexpr std::array<double, 3> c{1.5, 2.25, 2.625};
        std::vector<Residual> out;
        for (int k = 1; k <= 3; ++k) {
            const double x2k = std::pow(x[1], k);
            const double x2k1 = std::pow(x[1], k - 1);
            Residual r{c[static_cast<std::size_t>(k - 1)] - x[0] * (1.0 - x2k), Vec(2), DenseMat(2, 2)};
            r.grad << -(1.0 - x2k), x[0] * k * x2k1;
            const double x2k2 = k >= 2 ? std::pow(x[1], k - 2) : 0.0;
            r.hess << 0.0, k * x2k1, k * x2k1, x[0] * k * (k - 1) * x2k2;
            out.push_back(std::move(r));
        }
        return out;
    }));
    Vec x0(2);
    x0 << 1.0, 1.0;
    return make_element_problem("BEALE", 2, std::move(x0), std::move(s));
}

ProblemDef cube() {
    ElementSum s;
    s.elements.push_back(least_squares(2, [](const Vec& x) {
        Residual r1{x[0] - 1.0, Vec(2), DenseMat::Zero(2, 2)};
        r1.grad << 1.0, 0.0;
        Residual r2{10.0 * (x[1] - x[0] * x[0] * x[0]), Vec(2), DenseMat::Zero(2, 2)};
        r2.grad << -30.0 * x[0] * x[0], 10.0;
        r2.hess(0, 0) = -60.0 * x[0];
        return std::vector<Residual>{r1, r2};
    }));
    Vec x0(2);
    x0 << -1.2, 1.0;
    return make_element_problem("CUBE", 2, std::move(x0), std::move(s));
}

ProblemDef dqdrtic(int n) {
    // sum_{i<=n-2} x_i^2 + 100 x_{i+1}^2 + 100 x_{i+2}^2, separable per variable.
    ElementSum s;
    for (int k = 0; k < n; ++k) {
        double c = 0.0;
        if (k <= n - 3) c += 1.0;
        if (k >= 1 && k <= n - 2) c += 100.0;
        if (k >= 2) c += 100.0;
        s.elements.push_back(unary(k, [c](double a) { return D1{c * a * a, 2.0 * c * a, 2.0 * c}; }));
    }
    return make_element_problem("DQDRTIC", n, constant_start(n, 3.0), std::move(s));
}

ProblemDef dixon3dq(int n) {
    ElementSum s;
    auto anchor = [](double a) { return D1{(a - 1.0) * (a - 1.0), 2.0 * (a - 1.0), 2.0}; };
    s.elements.push_back(unary(0, anchor));
    for (int j = 1; j < n - 1; ++j) {
        s.elements.push_back(binary(j, j + 1, [](double a, double b) {
            const double d = a - b;
            return D2{d * d, 2.0 * d, -2.0 * d, 2.0, -2.0, 2.0};
        }));
    }
    s.elements.push_back(unary(n - 1, anchor));
    return make_element_problem("DIXON3DQ", n, constant_start(n, -1.0), std::move(s));
}

ProblemDef tridia(int n) {
    ElementSum s;
    s.elements.push_back(unary(0, [](double a) { return D1{(a - 1.0) * (a - 1.0), 2.0 * (a - 1.0), 2.0}; }));
    for (int i = 1; i < n; ++i) {
        const double w = i + 1;  // 1-based weight
        s.elements.push_back(binary(i - 1, i, [w](double a, double b) {
            const double t = 2.0 * b - a;
            return D2{w * t * t, -2.0 * w * t, 4.0 * w * t, 2.0 * w, -4.0 * w, 8.0 * w};
        }));
    }
    return make_element_problem("TRIDIA", n, constant_start(n, 1.0), std::move(s));
}

ProblemDef hilbertb(int n) {
    // x'Ax/2 with A = Hilbert(n) + 5 I.
    DenseMat a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            a(i, j) = 1.0 / (i + j + 1) + (i == j ? 5.0 : 0.0);
        }
    }
    ElementSum s;
    std::vector<int> vars(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) vars[static_cast<std::size_t>(i)] = i;
    s.elements.push_back({std::move(vars), [a](const Vec& u, double& f, Vec& g, DenseMat& h) {
                              g = a * u;
                              f = 0.5 * u.dot(g);
                              h = a;
                          }});
    return make_element_problem("HILBERTB", n, constant_start(n, -3.0), std::move(s));
}

ProblemDef engval2() {
    ElementSum s;
    s.elements.push_back(least_squares(3, [](const Vec& x) {
        std::vector<Residual> out;
        const DenseMat two = 2.0 * DenseMat::Identity(3, 3);
        Residual r1{x.squaredNorm() - 1.0, 2.0 * x, two};
        Vec g2 = 2.0 * x;
        g2[2] = 2.0 * (x[2] - 2.0);
        Residual r2{x[0] * x[0] + x[1] * x[1] + (x[2] - 2.0) * (x[2] - 2.0) - 1.0, g2, two};
        Residual r3{x[0] + x[1] + x[2] - 1.0, Vec::Ones(3), DenseMat::Zero(3, 3)};
        Vec g4(3);
        g4 << 1.0, 1.0, -1.0;
        Residual r4{x[0] + x[1] - x[2] + 1.0, g4, DenseMat::Zero(3, 3)};
        const double u = 5.0 * x[2] - x[0] + 1.0;
        Vec g5(3);
        g5 << 3.0 * x[0] * x[0] - 2.0 * u, 6.0 * x[1], 10.0 * u;
        DenseMat h5(3, 3);
        h5 << 6.0 * x[0] + 2.0, 0.0, -10.0, 0.0, 6.0, 0.0, -10.0, 0.0, 50.0;
        Residual r5{x[0] * x[0] * x[0] + 3.0 * x[1] * x[1] + u * u - 36.0, g5, h5};
        out = {r1, r2, r3, r4, r5};
        return out;
    }));
    Vec x0(3);
    x0 << 1.0, 2.0, 0.0;
    return make_element_problem("ENGVAL2", 3, std::move(x0), std::move(s));
}

ProblemDef box3() {
    ElementSum s;
    s.elements.push_back(least_squares(3, [](const Vec& x) {
        std::vector<Residual> out;
        for (int i = 1; i <= 10; ++i) {
            const double t = 0.1 * i;
            const double e1 = std::exp(-t * x[0]);
            const double e2 = std::exp(-t * x[1]);
            const double c = std::exp(-t) - std::exp(-10.0 * t);
            Residual r{e1 - e2 - x[2] * c, Vec(3), DenseMat::Zero(3, 3)};
            r.grad << -t * e1, t * e2, -c;
            r.hess(0, 0) = t * t * e1;
            r.hess(1, 1) = -t * t * e2;
            out.push_back(std::move(r));
        }
        return out;
    }));
    Vec x0(3);
    x0 << 0.0, 10.0, 20.0;
    return make_element_problem("BOX3", 3, std::move(x0), std::move(s));
}

ProblemDef cosine(int n) {
    ElementSum s;
    for (int i = 0; i < n - 1; ++i) {
        s.elements.push_back(binary(i, i + 1, [](double a, double b) {
            const double t = a * a - 0.5 * b;
            const double c = std::cos(t);
            const double sn = std::sin(t);
            return D2{c, -2.0 * a * sn, 0.5 * sn, -4.0 * a * a * c - 2.0 * sn, a * c, -0.25 * c};
        }));
    }
    return make_element_problem("COSINE", n, constant_start(n, 1.0), std::move(s));
}

ProblemDef engval1(int n) {
    ElementSum s;
    for (int i = 0; i < n - 1; ++i) {
        s.elements.push_back(binary(i, i + 1, [](double a, double b) {
            const double q = a * a + b * b;
            return D2{q * q - 4.0 * a + 3.0, 4.0 * q * a - 4.0, 4.0 * q * b,
                      4.0 * q + 8.0 * a * a, 8.0 * a * b, 4.0 * q + 8.0 * b * b};
        }));
    }
    return make_element_problem("ENGVAL1", n, constant_start(n, 2.0), std::move(s));
}

ProblemDef liarwhd(int n) {
    ElementSum s;
    // i = 1: 4 (x1^2 - x1)^2 + (x1 - 1)^2
    s.elements.push_back(unary(0, [](double a) {
        const double t = a * a - a;
        const double dt = 2.0 * a - 1.0;
        return D1{4.0 * t * t + (a - 1.0) * (a - 1.0), 8.0 * t * dt + 2.0 * (a - 1.0),
                  8.0 * (dt * dt + 2.0 * t) + 2.0};
    }));
    for (int i = 1; i < n; ++i) {
        // a = x1, b = x_i: 4 (b^2 - a)^2 + (b - 1)^2
        s.elements.push_back(binary(0, i, [](double a, double b) {
            const double t = b * b - a;
            return D2{4.0 * t * t + (b - 1.0) * (b - 1.0), -8.0 * t, 16.0 * t * b + 2.0 * (b - 1.0),
                      8.0, -16.0 * b, 32.0 * b * b + 16.0 * t + 2.0};
        }));
    }
    return make_element_problem("LIARWHD", n, constant_start(n, 4.0), std::move(s));
}

ProblemDef srosenbr(int n) {
    ElementSum s;
    Vec x0(n);
    for (int i = 0; i + 1 < n; i += 2) {
        x0[i] = -1.2;
        x0[i + 1] = 1.0;
        s.elements.push_back(binary(i, i + 1, [](double a, double b) {
            const double t = b - a * a;
            return D2{100.0 * t * t + (a - 1.0) * (a - 1.0), -400.0 * a * t + 2.0 * (a - 1.0), 200.0 * t,
                      1200.0 * a * a - 400.0 * b + 2.0, -400.0 * a, 200.0};
        }));
    }
    return make_element_problem("SROSENBR", n, std::move(x0), std::move(s));
}

ProblemDef dqrtic(int n) {
    ElementSum s;
    for (int i = 0; i < n; ++i) {
        const double c = i + 1;
        s.elements.push_back(unary(i, [c](double a) {
            const double d = a - c;
            return D1{d * d * d * d, 4.0 * d * d * d, 12.0 * d * d};
        }));
    }
    return make_element_problem("DQRTIC", n, constant_start(n, 2.0), std::move(s));
}

ProblemDef edensch(int n) {
    ElementSum s;
    s.constant = 16.0;
    for (int i = 0; i < n - 1; ++i) {
        s.elements.push_back(binary(i, i + 1, [](double a, double b) {
            const double am = a - 2.0;
            const double u = b * am;
            return D2{am * am * am * am + u * u + (b + 1.0) * (b + 1.0),
                      4.0 * am * am * am + 2.0 * u * b,
                      2.0 * u * am + 2.0 * (b + 1.0),
                      12.0 * am * am + 2.0 * b * b,
                      2.0 * am * b + 2.0 * u,
                      2.0 * am * am + 2.0};
        }));
    }
    return make_element_problem("EDENSCH", n, constant_start(n, 0.0), std::move(s));
}

ProblemDef testquad(int n) {
    ElementSum s;
    for (int i = 0; i < n; ++i) {
        const double c = i + 1;
        s.elements.push_back(unary(i, [c](double a) { return D1{c * a * a, 2.0 * c * a, 2.0 * c}; }));
    }
    return make_element_problem("TESTQUAD", n, constant_start(n, 1.0), std::move(s));
}

struct SetEntry {
    const char* name;
    int n;
};

const std::map<std::string, std::vector<SetEntry>>& set_table() {
    static const std::map<std::string, std::vector<SetEntry>> table{
        {"appB",
         {{"ARWHEAD", 10}, {"BEALE", 2}, {"BOX3", 3}, {"COSINE", 10}, {"CUBE", 2}, {"DIXON3DQ", 10},
          {"DQDRTIC", 10}, {"ENGVAL2", 3}, {"HILBERTB", 10}, {"TRIDIA", 10}}},
        {"appC",
         {{"COSINE", 200}, {"DQRTIC", 10}, {"EDENSCH", 200}, {"ENGVAL1", 200}, {"LIARWHD", 100},
          {"SROSENBR", 50}, {"TRIDIA", 200}}},
        {"appD",
         {{"DIXON3DQ", 200}, {"DQDRTIC", 100}, {"EDENSCH", 200}, {"ENGVAL1", 200}, {"LIARWHD", 200},
          {"SROSENBR", 50}, {"SROSENBR", 100}, {"TESTQUAD", 100}, {"TRIDIA", 200}}},
    };
    return table;
}

ProblemDef build(const std::string& name, int n) {
    if (name == "ARWHEAD") return arwhead(n);
    if (name == "BEALE") return beale();
    if (name == "BOX3") return box3();
    if (name == "COSINE") return cosine(n);
    if (name == "CUBE") return cube();
    if (name == "DIXON3DQ") return dixon3dq(n);
    if (name == "DQDRTIC") return dqdrtic(n);
    if (name == "DQRTIC") return dqrtic(n);
    if (name == "EDENSCH") return edensch(n);
    if (name == "ENGVAL1") return engval1(n);
    if (name == "ENGVAL2") return engval2();
    if (name == "HILBERTB") return hilbertb(n);
    if (name == "LIARWHD") return liarwhd(n);
    if (name == "SROSENBR") return srosenbr(n);
    if (name == "TESTQUAD") return testquad(n);
    if (name == "TRIDIA") return tridia(n);
    throw InvalidArgument("unknown problem " + name);
}

}  // namespace

ProblemDef make_quadratic(std::string name, const SymMat& c, const Vec& b, double a, Vec x0) {
    const auto n = static_cast<int>(c.rows());
    if (c.cols() != n || b.size() != n || x0.size() != n) {
        throw InvalidArgument("make_quadratic: dimension mismatch");
    }
    ProblemDef p;
    p.name = std::move(name);
    p.n = n;
    p.x0 = std::move(x0);
    p.eval_f = [c, b, a](const Vec& x) { return a + b.dot(x) + 0.5 * x.dot(c * x); };
    p.eval_grad = [c, b](const Vec& x) -> Vec { return b + c * x; };
    p.eval_hvp = [c](const Vec&, const Vec& v) -> Vec { return c * v; };
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            if (c(i, j) != 0.0) pairs.emplace_back(i, j);
        }
    }
    p.pattern = SparsityPattern(n, std::move(pairs));
    return p;
}

const std::vector<ProblemDef>& registry() {
    static const std::vector<ProblemDef> all = [] {
        std::vector<std::pair<std::string, int>> keys;
        for (const auto& [set, entries] : set_table()) {
            for (const SetEntry& e : entries) {
                keys.emplace_back(e.name, e.n);
            }
        }
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        std::vector<ProblemDef> out;
        out.reserve(keys.size());
        for (const auto& [name, n] : keys) {
            out.push_back(build(name, n));
        }
        return out;
    }();
    return all;
}

const ProblemDef& find_problem(const std::string& key) {
    const auto slash = key.find('/');
    const std::string name = key.substr(0, slash);
    int n = -1;
    if (slash != std::string::npos) {
        try {
            n = std::stoi(key.substr(slash + 1));
        } catch (const std::exception&) {
            throw InvalidArgument("bad problem dimension in '" + key + "'");
        }
    }
    for (const ProblemDef& p : registry()) {
        if (p.name == name && (n < 0 || p.n == n)) {
            return p;
        }
    }
    throw InvalidArgument("unknown problem '" + key + "'");
}

std::vector<const ProblemDef*> problem_set(const std::string& set_name) {
    const auto& table = set_table();
    const auto it = table.find(set_name);
    if (it == table.end()) {
        throw InvalidArgument("unknown problem set '" + set_name + "' (expected appB, appC or appD)");
    }
    std::vector<const ProblemDef*> out;
    for (const SetEntry& e : it->second) {
        out.push_back(&find_problem(std::string(e.name) + "/" + std::to_string(e.n)));
    }
    return out;
}

std::string FdReport::describe() const {
    std::ostringstream os;
    os << "gradient rel err " << grad_rel_err << ", hvp rel err " << hvp_rel_err;
    if (!grad_bad_components.empty()) {
        os << "; gradient mismatch at components";
        for (int i : grad_bad_components) os << ' ' << i;
    }
    if (!hvp_bad_components.empty()) {
        os << "; hvp mismatch at components";
        for (int i : hvp_bad_components) os << ' ' << i;
    }
    return os.str();
}

FdReport fd_check(const ProblemDef& p, const Vec& x, std::uint64_t seed) {
    constexpr double kGradTol = 1e-5;
    constexpr double kHvpTol = 1e-4;
    if (!x.allFinite() || x.size() != p.n) {
        throw InvalidArgument("fd_check: point must be finite and of dimension n");
    }
    FdReport report;
    const double h = 1e-6 * (1.0 + x.norm());

    const Vec g = p.eval_grad(x);
    Vec fd(p.n);
    Vec xp = x;
    for (int i = 0; i < p.n; ++i) {
        const double xi = x[i];
        xp[i] = xi + h;
        const double fp = p.eval_f(xp);
        xp[i] = xi - h;
        const double fm = p.eval_f(xp);
        xp[i] = xi;
        fd[i] = (fp - fm) / (2.0 * h);
    }
    const double gscale = std::max(1.0, g.norm());
    report.grad_rel_err = (fd - g).norm() / gscale;
    for (int i = 0; i < p.n; ++i) {
        if (std::abs(fd[i] - g[i]) > kGradTol * gscale) {
            report.grad_bad_components.push_back(i);
        }
    }

    RngStream rng(seed);
    for (int trial = 0; trial < 5; ++trial) {
        Vec v = unit_ball_sample(rng, p.n);
        v.normalize();
        const Vec hv = p.eval_hvp(x, v);
        const Vec fdh = (p.eval_grad(x + h * v) - p.eval_grad(x - h * v)) / (2.0 * h);
        const double scale = std::max(1.0, hv.norm());
        report.hvp_rel_err = std::max(report.hvp_rel_err, (fdh - hv).norm() / scale);
        for (int i = 0; i < p.n; ++i) {
            if (std::abs(fdh[i] - hv[i]) > kHvpTol * scale &&
                std::find(report.hvp_bad_components.begin(), report.hvp_bad_components.end(), i) ==
                    report.hvp_bad_components.end()) {
                report.hvp_bad_components.push_back(i);
            }
        }
    }
    std::sort(report.hvp_bad_components.begin(), report.hvp_bad_components.end());
    return report;
}

}  // namespace hfree
