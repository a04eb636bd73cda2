#include "hfree/bench.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

namespace hfree::bench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, sep)) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    if (v.size() % 2 == 1) {
        return v[m];
    }
    if (std::isinf(v[m - 1]) || std::isinf(v[m])) {
        return kInf;
    }
    return 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

std::string to_string(Metric m) {
    switch (m) {
        case Metric::hvp: return "hvp";
        case Metric::iters: return "iters";
        case Metric::fevals: return "fevals";
    }
    return "unknown";
}

Metric parse_metric(const std::string& text) {
    for (Metric m : {Metric::hvp, Metric::iters, Metric::fevals}) {
        if (to_string(m) == text) return m;
    }
    throw InvalidArgument("unknown metric '" + text + "' (expected hvp, iters or fevals)");
}

std::vector<ProfileCurve> performance_profile(const std::vector<std::vector<double>>& t,
                                              const std::vector<std::string>& solvers,
                                              const std::vector<double>& taus, std::vector<int>* dropped) {
    if (t.empty() || solvers.empty()) {
        throw EmptyInput("performance_profile: no problems or no solvers");
    }
    for (const auto& row : t) {
        if (row.size() != solvers.size()) {
            throw InvalidArgument("performance_profile: row width does not match the solver count");
        }
        for (double v : row) {
            if (!(v > 0.0)) {
                throw InvalidArgument("performance_profile: metric values must be positive or +inf");
            }
        }
    }
    // Ratios per kept problem.
    std::vector<std::vector<double>> ratios;
    for (std::size_t p = 0; p < t.size(); ++p) {
        const double best = *std::min_element(t[p].begin(), t[p].end());
        if (std::isinf(best)) {
            if (dropped) dropped->push_back(static_cast<int>(p));
            continue;
        }
        std::vector<double> r(solvers.size());
        for (std::size_t s = 0; s < solvers.size(); ++s) {
            r[s] = t[p][s] / best;
        }
        ratios.push_back(std::move(r));
    }
    // Unsolved problems stay in the denominator.
    const double np = static_cast<double>(t.size());
    std::vector<ProfileCurve> curves;
    for (std::size_t s = 0; s < solvers.size(); ++s) {
        ProfileCurve c{solvers[s], taus, std::vector<double>(taus.size(), 0.0)};
        for (std::size_t k = 0; k < taus.size(); ++k) {
            int count = 0;
            for (const auto& r : ratios) {
                if (r[s] <= taus[k]) ++count;
            }
            c.rho[k] = count / np;
        }
        curves.push_back(std::move(c));
    }
    return curves;
}

std::vector<double> tau_grid(const std::vector<std::vector<double>>& t, int points) {
    if (points < 2) {
        throw InvalidArgument("tau_grid: need at least two points");
    }
    double max_ratio = 1.0;
    for (const auto& row : t) {
        const double best = *std::min_element(row.begin(), row.end());
        if (std::isinf(best)) continue;
        for (double v : row) {
            if (std::isfinite(v)) max_ratio = std::max(max_ratio, v / best);
        }
    }
    std::vector<double> taus(static_cast<std::size_t>(points));
    const double log_max = std::log(max_ratio);
    for (int i = 0; i < points; ++i) {
        taus[static_cast<std::size_t>(i)] = std::exp(log_max * i / (points - 1));
    }
    taus.front() = 1.0;
    taus.back() = max_ratio;
    return taus;
}

RunRow to_row(const RunRecord& rec) {
    RunRow r;
    r.problem = rec.problem;
    r.n = rec.n;
    r.method = rec.method;
    r.seed = rec.seed;
    r.status = rec.status;
    r.iters = rec.counters.n_iter;
    r.hvp = rec.counters.n_hvp;
    r.fevals = rec.counters.n_f;
    r.gevals = rec.counters.n_grad;
    r.final_f = rec.final_f;
    r.final_gnorm = rec.final_grad_norm;
    r.wall_ms = rec.wall_ms;
    return r;
}

void write_runs_csv(std::ostream& os, const std::vector<RunRow>& rows) {
    os << kRunsHeader << '\n';
    for (const RunRow& r : rows) {
        os << r.problem << ',' << r.n << ',' << r.method << ',' << r.seed << ',' << to_string(r.status) << ','
           << r.iters << ',' << r.hvp << ',' << r.fevals << ',' << r.gevals << ',' << fmt_double(r.final_f) << ','
           << fmt_double(r.final_gnorm) << ',' << fmt_double(r.wall_ms) << '\n';
    }
}

std::vector<RunRow> read_runs_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kRunsHeader) {
        throw InvalidArgument("read_runs_csv: missing or unexpected header");
    }
    std::vector<RunRow> rows;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto c = split(line, ',');
        if (c.size() != 12) {
            throw InvalidArgument("read_runs_csv: line " + std::to_string(lineno) + " has " +
                                  std::to_string(c.size()) + " fields");
        }
        try {
            RunRow r;
            r.problem = c[0];
            r.n = std::stoi(c[1]);
            r.method = c[2];
            r.seed = std::stoull(c[3]);
            r.status = parse_status(c[4]);
            r.iters = std::stoll(c[5]);
            r.hvp = std::stoll(c[6]);
            r.fevals = std::stoll(c[7]);
            r.gevals = std::stoll(c[8]);
            r.final_f = std::stod(c[9]);
            r.final_gnorm = std::stod(c[10]);
            r.wall_ms = std::stod(c[11]);
            rows.push_back(std::move(r));
        } catch (const std::logic_error& e) {
            throw InvalidArgument("read_runs_csv: line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return rows;
}

MetricTable aggregate(const std::vector<RunRow>& rows, Metric metric) {
    MetricTable table;
    std::map<std::pair<std::string, std::string>, std::vector<double>> samples;
    for (const RunRow& r : rows) {
        const std::string key = r.problem + "/" + std::to_string(r.n);
        if (std::find(table.problems.begin(), table.problems.end(), key) == table.problems.end()) {
            table.problems.push_back(key);
        }
        if (std::find(table.solvers.begin(), table.solvers.end(), r.method) == table.solvers.end()) {
            table.solvers.push_back(r.method);
        }
        double v = kInf;
        if (r.status == RunStatus::converged) {
            const std::int64_t count = metric == Metric::hvp ? r.hvp : metric == Metric::iters ? r.iters : r.fevals;
            v = static_cast<double>(std::max<std::int64_t>(count, 1));
        }
        samples[{key, r.method}].push_back(v);
    }
    for (const std::string& p : table.problems) {
        std::vector<double> row;
        for (const std::string& s : table.solvers) {
            const auto it = samples.find({p, s});
            row.push_back(it == samples.end() ? kInf : median(it->second));
        }
        table.t.push_back(std::move(row));
    }
    return table;
}

void write_profile_csv(std::ostream& os, const std::vector<ProfileCurve>& curves) {
    os << "tau";
    for (const ProfileCurve& c : curves) os << ',' << c.solver;
    os << '\n';
    if (curves.empty()) return;
    for (std::size_t k = 0; k < curves.front().taus.size(); ++k) {
        os << fmt_double(curves.front().taus[k]);
        for (const ProfileCurve& c : curves) os << ',' << fmt_double(c.rho[k]);
        os << '\n';
    }
}

std::string profile_csv_from_rows(const std::vector<RunRow>& rows, Metric metric) {
    const MetricTable table = aggregate(rows, metric);
    std::vector<int> dropped;
    const auto curves = performance_profile(table.t, table.solvers, tau_grid(table.t), &dropped);
    for (int p : dropped) {
        std::cerr << "warning: no solver converged on " << table.problems[static_cast<std::size_t>(p)]
                  << "; counted as unsolved for every solver\n";
    }
    std::ostringstream os;
    write_profile_csv(os, curves);
    return os.str();
}

std::vector<RunRecord> run_suite(const SuiteOptions& opt) {
    if (opt.problems.empty() || opt.methods.empty() || opt.seeds < 1) {
        throw EmptyInput("run_suite: need at least one problem, one method and one seed");
    }
    struct Job {
        const ProblemDef* problem;
        Method method;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const ProblemDef* p : opt.problems) {
        for (Method m : opt.methods) {
            for (int s = 0; s < opt.seeds; ++s) {
                jobs.push_back({p, m, opt.master_seed + static_cast<std::uint64_t>(s)});
            }
        }
    }
    std::vector<RunRecord> out(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            SolverConfig cfg = opt.base;
            cfg.method = jobs[i].method;
            cfg.seed = jobs[i].seed;
            try {
                out[i] = run(*jobs[i].problem, cfg);
            } catch (const std::exception& e) {
                RunRecord rec;
                rec.problem = jobs[i].problem->name;
                rec.n = jobs[i].problem->n;
                rec.method = to_string(cfg.method);
                rec.seed = cfg.seed;
                rec.status = RunStatus::numeric_failure;
                rec.final_f = std::nan("");
                rec.final_grad_norm = std::nan("");
                std::cerr << "run " << jobs[i].problem->key() << ' ' << rec.method << " failed: " << e.what()
                          << '\n';
                out[i] = std::move(rec);
            }
        }
    };
    const int nthreads = std::max(1, std::min<int>(opt.jobs, static_cast<int>(jobs.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return out;
}

void write_suite_outputs(const std::string& dir, const std::vector<RunRecord>& records, Metric metric,
                         bool record_wall_time, const std::string& set_label) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<RunRow> rows;
    rows.reserve(records.size());
    for (const RunRecord& rec : records) {
        RunRow r = to_row(rec);
        if (!record_wall_time) r.wall_ms = 0.0;
        rows.push_back(std::move(r));
    }
    {
        std::ofstream os(fs::path(dir) / "runs.csv", std::ios::binary);
        write_runs_csv(os, rows);
    }
    // Re-read so profiles are computed from exactly what was written.
    std::vector<RunRow> reread;
    {
        std::ifstream is(fs::path(dir) / "runs.csv", std::ios::binary);
        reread = read_runs_csv(is);
    }
    const std::string profile = profile_csv_from_rows(reread, metric);
    {
        std::ofstream os(fs::path(dir) / ("profile_" + to_string(metric) + ".csv"), std::ios::binary);
        os << profile;
    }

    const MetricTable table = aggregate(reread, metric);
    nlohmann::ordered_json summary;
    summary["set"] = set_label;
    summary["metric"] = to_string(metric);
    summary["problems"] = table.problems;
    summary["runs"] = rows.size();
    nlohmann::ordered_json per_solver = nlohmann::ordered_json::object();
    const auto curves = performance_profile(table.t, table.solvers, {1.0});
    for (std::size_t s = 0; s < table.solvers.size(); ++s) {
        int converged = 0;
        int total = 0;
        for (const RunRow& r : reread) {
            if (r.method != table.solvers[s]) continue;
            ++total;
            if (r.status == RunStatus::converged) ++converged;
        }
        std::vector<double> finite;
        for (const auto& row : table.t) {
            if (std::isfinite(row[s])) finite.push_back(row[s]);
        }
        nlohmann::ordered_json entry;
        entry["runs"] = total;
        entry["converged"] = converged;
        entry["median_metric"] = finite.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(median(finite));
        entry["rho_at_1"] = curves[s].rho[0];
        per_solver[table.solvers[s]] = entry;
    }
    summary["solvers"] = per_solver;
    std::ofstream os(fs::path(dir) / "summary.json", std::ios::binary);
    os << summary.dump(2) << '\n';
}

}  // namespace hfree::bench
