#ifndef HFREE_BENCH_HPP
#define HFREE_BENCH_HPP

#include "hfree/drivers.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hfree::bench {

enum class Metric { hvp, iters, fevals };

std::string to_string(Metric m);
Metric parse_metric(const std::string& text);

struct ProfileCurve {
    std::string solver;
    std::vector<double> taus;
    std::vector<double> rho;
};

/// rho_s(tau) = |{p : t_ps / min_s' t_ps' <= tau}| / |P|. Entries are positive
/// or +inf (failure). Rows where every solver failed have no reference value;
/// they are reported through `dropped` when given and count as unsolved for
/// every solver. Throws EmptyInput.
std::vector<ProfileCurve> performance_profile(const std::vector<std::vector<double>>& t,
                                              const std::vector<std::string>& solvers,
                                              const std::vector<double>& taus,
                                              std::vector<int>* dropped = nullptr);

/// Geometric grid of `points` values from 1 to the largest finite performance ratio.
std::vector<double> tau_grid(const std::vector<std::vector<double>>& t, int points = 64);

/// One line of runs.csv.
struct RunRow {
    std::string problem;
    int n = 0;
    std::string method;
    std::uint64_t seed = 0;
    RunStatus status = RunStatus::max_iter;
    std::int64_t iters = 0;
    std::int64_t hvp = 0;
    std::int64_t fevals = 0;
    std::int64_t gevals = 0;
    double final_f = 0.0;
    double final_gnorm = 0.0;
    double wall_ms = 0.0;
};

RunRow to_row(const RunRecord& rec);

inline constexpr const char* kRunsHeader =
    "problem,n,method,seed,status,iters,hvp,fevals,gevals,final_f,final_gnorm,wall_ms";

void write_runs_csv(std::ostream& os, const std::vector<RunRow>& rows);
std::vector<RunRow> read_runs_csv(std::istream& is);

/// Per-problem metric (median over seeds; failed runs count as +inf, zero
/// counts are raised to one) laid out problems x solvers.
struct MetricTable {
    std::vector<std::string> problems;  // "NAME/n", first-seen order
    std::vector<std::string> solvers;   // first-seen order
    std::vector<std::vector<double>> t;
};

MetricTable aggregate(const std::vector<RunRow>& rows, Metric metric);

/// tau followed by one rho column per solver.
void write_profile_csv(std::ostream& os, const std::vector<ProfileCurve>& curves);

/// runs.csv -> profile CSV text, the same path `bench run` and `bench profile` use.
std::string profile_csv_from_rows(const std::vector<RunRow>& rows, Metric metric);

struct SuiteOptions {
    std::vector<const ProblemDef*> problems;
    std::vector<Method> methods;
    int seeds = 3;
    std::uint64_t master_seed = 1;
    SolverConfig base;
    int jobs = 1;
};

/// Runs every (problem, method, seed) combination. Individual failures are
/// recorded in the returned records; they never abort the suite. Output
/// order is problem-major, then method, then seed, independent of `jobs`.
std::vector<RunRecord> run_suite(const SuiteOptions& opt);

/// Writes runs.csv, profile_<metric>.csv and summary.json into `dir`.
/// wall_ms is written as 0 unless `record_wall_time` is set, so that repeated
/// runs produce byte-identical files.
void write_suite_outputs(const std::string& dir, const std::vector<RunRecord>& records, Metric metric,
                         bool record_wall_time, const std::string& set_label);

}  // namespace hfree::bench

#endif  // HFREE_BENCH_HPP
