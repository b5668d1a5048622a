#pragma once

#include "fracttm/metrics.hpp"
#include "fracttm/ttm.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fracttm {

enum class Method { ttm, fe, both };

/// One study: (alpha, theta, epsilon) are crossed; (h, tau_c, M) are zipped
/// into a ladder, a list of length one being broadcast.
struct StudyConfig {
    std::string problem = "example1";
    Method method = Method::ttm;
    std::vector<double> alphas{1.5};
    std::vector<double> thetas{0.0};
    std::vector<double> epsilons{0.01};
    std::vector<double> hs;
    std::vector<double> tau_cs;
    std::vector<int> Ms;
    /// Fine step per ladder row; defaults to tau_c / M.
    std::vector<double> taus;
    double horizon = 1.0;
    int reference_res = 64;
    /// Empty: $FRACTTM_CACHE_DIR, and no disk cache when that is unset too.
    std::string cache_dir;
    /// Timed runs per cell after one untimed warm-up; 1 disables the warm-up.
    int timing_runs = 3;
    NewtonConfig newton;
    LinearSolverConfig linear;
};

struct LadderRow {
    int n_cells;
    double tau_c;
    double tau;
    int M;
};

/// Expands and validates the (h, tau_c, M[, tau]) ladder.
std::vector<LadderRow> study_ladder(const StudyConfig& config);

/// One CSV row; absent values are written as empty fields.
struct ReportRow {
    std::string problem;
    std::string method;
    double alpha = 0.0;
    double theta = 0.0;
    double epsilon = 0.0;
    double h = 0.0;
    double tau_c = 0.0;
    double tau = 0.0;
    int M = 1;
    std::optional<double> err_l2;
    std::optional<double> rate_l2;
    std::optional<double> err_mu;
    std::optional<double> rate_mu;
    std::optional<double> cpu_s;
    std::string status = "ok";
};

struct ConvergenceReport {
    std::vector<ReportRow> rows;
};

/// problem,method,alpha,theta,epsilon,h,tau_c,tau,M,err_l2,rate_l2,err_mu,rate_mu,cpu_s,status
std::string csv_header();
void write_csv(std::ostream& os, const ConvergenceReport& report);
void write_csv(const std::string& path, const ConvergenceReport& report);

/// Error rows per ladder row and method; rates between consecutive rows of the
/// same (alpha, theta, epsilon, method) use the h ratio. Failed cells keep a
/// status message and the study continues.
ConvergenceReport run_convergence_study(const StudyConfig& config);

/// Fixed (alpha, theta, epsilon, h, tau); one row per M, M = 1 meaning the
/// standard FE method. Uses the first entries of the config lists and config.taus[0].
ConvergenceReport run_m_study(const StudyConfig& config);

/// Reference solution cache entry.
struct ReferenceKey {
    std::string problem;
    double alpha = 1.5;
    double epsilon = 0.01;
    double theta = 0.0;
    int resolution = 64;  // h_ref = tau_ref = 1 / resolution
    double horizon = 1.0;

    std::string describe() const;
    std::uint64_t hash() const;
};

struct ReferenceSolution {
    ReferenceKey key;
    TensorMesh2D mesh = TensorMesh2D::unit_square(2);
    std::vector<StateVector> checkpoints;  // last entry is the final time

    const StateVector& final_state() const { return checkpoints.back(); }
};

inline constexpr std::uint32_t kReferenceFormatVersion = 1;

/// Standard FE run at h = tau = 1 / resolution with the iterative solver.
ReferenceSolution build_reference(const ReferenceKey& key, const NewtonConfig& newton = {});

void save_reference(const std::string& path, const ReferenceSolution& ref);
/// nullopt when the file is missing, of another format version, or keyed differently.
std::optional<ReferenceSolution> load_reference(const std::string& path, const ReferenceKey& key);

/// Looks up `dir` (or builds and stores the entry); dir empty means no disk cache.
ReferenceSolution cached_reference(const std::string& dir, const ReferenceKey& key,
                                   const NewtonConfig& newton = {});
std::string reference_file_name(const ReferenceKey& key);

/// "x y value" header, then every node including the boundary, y outer and x inner.
void emit_surface(const StateVector& state, const TensorMesh2D& mesh, const std::string& path);
void emit_surface(const SpaceFn& f, const TensorMesh2D& mesh, const std::string& path);

struct SurfacePoint {
    double x, y, value;
};
std::vector<SurfacePoint> parse_surface(const std::string& path);

/// Median of `runs` timings after one warm-up call when runs > 1.
template <class F>
double median_cpu(int runs, F&& timed_call);

}  // namespace fracttm

#include <algorithm>

template <class F>
double fracttm::median_cpu(int runs, F&& timed_call) {
    if (runs > 1) {
        timed_call();
    }
    std::vector<double> t;
    for (int k = 0; k < std::max(runs, 1); ++k) {
        t.push_back(timed_call());
    }
    std::sort(t.begin(), t.end());
    return t[t.size() / 2];
}
