// Command-line front end: run benchmark suites, rebuild performance profiles
// from an existing runs.csv, and self-check the problem oracles.

#include "hfree/bench.hpp"
#include "hfree/problems.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void write_traces(const std::string& dir, const std::vector<hfree::RunRecord>& records) {
    namespace fs = std::filesystem;
    const fs::path tdir = fs::path(dir) / "traces";
    fs::create_directories(tdir);
    for (const auto& rec : records) {
        std::ofstream os(tdir / (rec.problem + "_" + std::to_string(rec.n) + "_" + rec.method + "_" +
                                 std::to_string(rec.seed) + ".jsonl"));
        for (const auto& t : rec.trace) {
            nlohmann::ordered_json j;
            j["iter"] = t.iter;
            j["f"] = t.f;
            j["grad_norm"] = t.grad_norm;
            j["alpha"] = t.alpha;
            j["inner_iters"] = t.inner_iters;
            j["hvps"] = t.hvps;
            os << j.dump() << '\n';
        }
    }
}

int check_problems() {
    int failures = 0;
    for (const hfree::ProblemDef& p : hfree::registry()) {
        hfree::RngStream rng(11);
        const hfree::Vec x = p.x0 + 0.1 * hfree::unit_ball_sample(rng, p.n);
        bool ok = true;
        std::string detail;
        for (const hfree::Vec& pt : {p.x0, x}) {
            const hfree::FdReport rep = hfree::fd_check(p, pt);
            if (!rep.ok()) {
                ok = false;
                detail = rep.describe();
            }
        }
        // Symmetry of the Hessian-vector oracle.
        for (int trial = 0; trial < 10 && ok; ++trial) {
            const hfree::Vec u = hfree::unit_ball_sample(rng, p.n);
            const hfree::Vec v = hfree::unit_ball_sample(rng, p.n);
            const double a = u.dot(p.eval_hvp(x, v));
            const double b = v.dot(p.eval_hvp(x, u));
            if (std::abs(a - b) > 1e-8 * std::max({1.0, std::abs(a), std::abs(b)})) {
                ok = false;
                detail = "hvp not symmetric";
            }
        }
        // Structural zeros outside the pattern.
        if (ok && p.pattern) {
            for (int j = 0; j < p.n && ok; ++j) {
                const hfree::Vec col = p.eval_hvp(x, hfree::Vec::Unit(p.n, j));
                for (int i = 0; i < p.n; ++i) {
                    if (!p.pattern->contains(i, j) && std::abs(col[i]) > 1e-12) {
                        ok = false;
                        detail = "hvp nonzero outside pattern";
                        break;
                    }
                }
            }
        }
        std::cout << (ok ? "PASS " : "FAIL ") << p.key() << (ok ? "" : " : " + detail) << '\n';
        if (!ok) ++failures;
    }
    std::cout << failures << " problem(s) failed\n";
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Benchmarks for Hessian-free model-based line-search methods"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "run a benchmark suite and write runs.csv, profiles and summary");
    std::string set = "appB";
    std::string problems;
    std::string methods = "inexact_newton,hessian_model,newton_model";
    std::string metric = "hvp";
    int seeds = 3;
    std::uint64_t master_seed = 1;
    std::string out_dir = "bench_out";
    std::string force_rule = "sqrt";
    std::string safeguard = "deficit";
    int max_iter = 2000;
    double wall_limit = 60.0;
    int jobs = 1;
    bool trace = false;
    bool wall_time = false;
    run_cmd->add_option("--set", set, "problem set: appB, appC or appD");
    run_cmd->add_option("--problems", problems, "comma-separated problem names (NAME or NAME/n); overrides --set");
    run_cmd->add_option("--methods", methods,
                        "comma-separated methods: inexact_newton, hessian_model, hessian_model_sparse, newton_model");
    run_cmd->add_option("--metric", metric, "profile metric: hvp, iters or fevals");
    run_cmd->add_option("--seeds", seeds, "number of seeds per (problem, method)")->check(CLI::PositiveNumber);
    run_cmd->add_option("--seed", master_seed, "first seed");
    run_cmd->add_option("--out", out_dir, "output directory");
    run_cmd->add_option("--force-rule", force_rule, "CG forcing rule: sqrt or const:<value>");
    run_cmd->add_option("--safeguard", safeguard, "descent safeguard: deficit or always")
        ->check(CLI::IsMember({"deficit", "always"}));
    run_cmd->add_option("--max-iter", max_iter, "iteration limit per run")->check(CLI::PositiveNumber);
    run_cmd->add_option("--wall-limit", wall_limit, "wall-clock limit per run, seconds");
    run_cmd->add_option("--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);
    run_cmd->add_flag("--trace", trace, "write per-iteration traces under <out>/traces");
    run_cmd->add_flag("--wall-time", wall_time, "record wall_ms in runs.csv (breaks byte-reproducibility)");

    auto* profile_cmd = app.add_subcommand("profile", "recompute a performance profile from runs.csv");
    std::string in_csv;
    std::string profile_out;
    profile_cmd->add_option("--in", in_csv, "runs.csv to read")->required();
    profile_cmd->add_option("--metric", metric, "profile metric: hvp, iters or fevals");
    profile_cmd->add_option("--out", profile_out, "output file (default: stdout)");

    auto* check_cmd = app.add_subcommand("check", "finite-difference and structural checks of every problem");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            hfree::bench::SuiteOptions opt;
            std::string label = set;
            if (!problems.empty()) {
                for (const auto& name : split_list(problems)) opt.problems.push_back(&hfree::find_problem(name));
                label = "custom";
            } else {
                opt.problems = hfree::problem_set(set);
            }
            for (const auto& m : split_list(methods)) opt.methods.push_back(hfree::parse_method(m));
            opt.seeds = seeds;
            opt.master_seed = master_seed;
            opt.jobs = jobs;
            opt.base.force_rule = hfree::ForceRule::parse(force_rule);
            opt.base.safeguard =
                safeguard == "always" ? hfree::SafeguardMode::always : hfree::SafeguardMode::deficit;
            opt.base.max_iter = max_iter;
            opt.base.wall_limit_s = wall_limit;
            opt.base.trace = trace;
            const auto metric_kind = hfree::bench::parse_metric(metric);

            const auto records = hfree::bench::run_suite(opt);
            hfree::bench::write_suite_outputs(out_dir, records, metric_kind, wall_time, label);
            if (trace) write_traces(out_dir, records);

            bool numeric_failure = false;
            for (const auto& r : records) {
                std::cout << r.problem << '/' << r.n << ' ' << r.method << " seed " << r.seed << ": "
                          << hfree::to_string(r.status) << " iters " << r.counters.n_iter << " hvp "
                          << r.counters.n_hvp << " fevals " << r.counters.n_f << '\n';
                numeric_failure = numeric_failure || r.status == hfree::RunStatus::numeric_failure;
            }
            std::cout << "wrote " << out_dir << "/runs.csv\n";
            return numeric_failure ? 1 : 0;
        }
        if (profile_cmd->parsed()) {
            std::ifstream is(in_csv, std::ios::binary);
            if (!is) {
                std::cerr << "cannot open " << in_csv << '\n';
                return 2;
            }
            const auto rows = hfree::bench::read_runs_csv(is);
            const std::string text = hfree::bench::profile_csv_from_rows(rows, hfree::bench::parse_metric(metric));
            if (profile_out.empty()) {
                std::cout << text;
            } else {
                std::ofstream os(profile_out, std::ios::binary);
                os << text;
            }
            return 0;
        }
        if (check_cmd->parsed()) {
            return check_problems();
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
