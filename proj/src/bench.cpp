#include "fracttm/bench.hpp"

#include "fracttm/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fracttm {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(const std::optional<double>& v) {
    return v ? fmt(*v) : std::string();
}

std::string sanitize(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r') {
            c = ';';
        }
    }
    return s;
}

int cells_from_h(double h) {
    if (!(h > 0.0 && h <= 0.5)) {
        throw DomainError("study: h must lie in (0, 1/2]");
    }
    const long long n = std::llround(1.0 / h);
    if (std::abs(n * h - 1.0) > 1e-9) {
        throw DomainError("study: 1/h must be an integer, got h = " + fmt(h));
    }
    return static_cast<int>(n);
}

template <class T>
T pick(const std::vector<T>& v, std::size_t k) {
    return v.size() == 1 ? v[0] : v[k];
}

bool needs_reference(const ProblemSpec& p) {
    return !p.exact.has_value();
}

struct CellResult {
    std::optional<double> err_l2;
    std::optional<double> err_mu;
    std::optional<double> cpu;
};

/// Runs one (problem, discretization, method) cell and measures errors at the horizon.
CellResult run_cell(const ProblemSpec& problem, const OperatorSet& ops, DiscretizationConfig disc,
                    bool ttm, int timing_runs, const ReferenceSolution* ref) {
    disc.keep_trajectory = false;
    Vector final_state;
    auto timed = [&]() {
        if (ttm) {
            TtmRun r = run_ttm(problem, disc, ops);
            final_state = r.fine_states.back().coeffs;
            return r.timings.total();
        }
        FeRun r = run_standard_fe(problem, disc, ops);
        final_state = r.states.back().coeffs;
        return r.cpu_seconds;
    };
    CellResult out;
    out.cpu = median_cpu(timing_runs, timed);
    const double t = problem.horizon;
    if (problem.exact) {
        out.err_l2 = error_l2(ops, final_state, problem.exact->u, t);
        out.err_mu = error_frac_norm(ops, final_state, problem, problem.order.mu(), t);
    } else if (ref) {
        out.err_l2 = error_l2_reference(ops, final_state, ref->mesh, ref->final_state().coeffs);
    }
    return out;
}

std::string resolve_cache_dir(const std::string& dir) {
    if (!dir.empty()) {
        return dir;
    }
    const char* env = std::getenv("FRACTTM_CACHE_DIR");
    return env ? std::string(env) : std::string();
}

void add_rates(ConvergenceReport& report, std::size_t first) {
    // Consecutive rows of the same method inside one (alpha, theta, epsilon) block.
    for (std::size_t k = first; k < report.rows.size(); ++k) {
        ReportRow& cur = report.rows[k];
        for (std::size_t j = k; j-- > first;) {
            const ReportRow& prev = report.rows[j];
            if (prev.method != cur.method) {
                continue;
            }
            const double ratio = prev.h / cur.h;
            if (ratio > 1.0) {
                if (prev.err_l2 && cur.err_l2 && *prev.err_l2 > 0.0 && *cur.err_l2 > 0.0) {
                    cur.rate_l2 = convergence_rate(*prev.err_l2, *cur.err_l2, ratio);
                }
                if (prev.err_mu && cur.err_mu && *prev.err_mu > 0.0 && *cur.err_mu > 0.0) {
                    cur.rate_mu = convergence_rate(*prev.err_mu, *cur.err_mu, ratio);
                }
            }
            break;
        }
    }
}

}  // namespace

std::vector<LadderRow> study_ladder(const StudyConfig& c) {
    if (c.hs.empty()) {
        return {};
    }
    std::size_t len = c.hs.size();
    for (std::size_t s : {c.tau_cs.size(), c.Ms.size(), c.taus.size()}) {
        len = std::max(len, s);
    }
    auto check = [&](std::size_t s, const char* name, bool optional) {
        if ((s == 0 && !optional) || (s != 0 && s != 1 && s != len)) {
            throw DomainError(std::string("study: list --") + name + " must have length 1 or " +
                              std::to_string(len));
        }
    };
    check(c.hs.size(), "h", false);
    check(c.Ms.size(), "M", false);
    check(c.tau_cs.size(), "tau-c", !c.taus.empty());
    check(c.taus.size(), "tau", true);
    std::vector<LadderRow> rows;
    for (std::size_t k = 0; k < len; ++k) {
        LadderRow r;
        r.n_cells = cells_from_h(pick(c.hs, k));
        r.M = pick(c.Ms, k);
        if (r.M < 1) {
            throw DomainError("study: M must be positive");
        }
        if (!c.taus.empty()) {
            r.tau = pick(c.taus, k);
            r.tau_c = c.tau_cs.empty() ? r.M * r.tau : pick(c.tau_cs, k);
            if (std::abs(r.tau_c - r.M * r.tau) > 1e-12 * r.tau_c) {
                throw DomainError("study: tau_c must equal M * tau");
            }
        } else {
            r.tau_c = pick(c.tau_cs, k);
            r.tau = r.tau_c / r.M;
        }
        if (r.M >= 2) {
            (void)TwoMeshGrid(r.tau, r.M, c.horizon);
        } else {
            (void)step_count(c.horizon, r.tau);
        }
        rows.push_back(r);
    }
    return rows;
}

std::string csv_header() {
    return "problem,method,alpha,theta,epsilon,h,tau_c,tau,M,err_l2,rate_l2,err_mu,rate_mu,cpu_s,status";
}

void write_csv(std::ostream& os, const ConvergenceReport& report) {
    os << csv_header() << '\n';
    for (const ReportRow& r : report.rows) {
        os << r.problem << ',' << r.method << ',' << fmt(r.alpha) << ',' << fmt(r.theta) << ','
           << fmt(r.epsilon) << ',' << fmt(r.h) << ',' << fmt(r.tau_c) << ',' << fmt(r.tau) << ',' << r.M
           << ',' << fmt(r.err_l2) << ',' << fmt(r.rate_l2) << ',' << fmt(r.err_mu) << ','
           << fmt(r.rate_mu) << ',' << fmt(r.cpu_s) << ',' << sanitize(r.status) << '\n';
    }
}

void write_csv(const std::string& path, const ConvergenceReport& report) {
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    write_csv(os, report);
    if (!os) {
        throw std::runtime_error("write to " + path + " failed");
    }
}

ConvergenceReport run_convergence_study(const StudyConfig& config) {
    ConvergenceReport report;
    const std::vector<LadderRow> ladder = study_ladder(config);
    if (ladder.empty()) {
        return report;
    }
    const std::string cache = resolve_cache_dir(config.cache_dir);
    std::vector<bool> methods;  // true = TT-M
    if (config.method != Method::fe) {
        methods.push_back(true);
    }
    if (config.method != Method::ttm) {
        methods.push_back(false);
    }

    for (double alpha : config.alphas) {
        for (double theta : config.thetas) {
            for (double eps : config.epsilons) {
                const std::size_t block = report.rows.size();
                std::optional<ProblemSpec> problem;
                std::optional<ReferenceSolution> ref;
                std::string block_error;
                try {
                    problem = make_problem(config.problem, alpha, eps);
                    problem->horizon = config.horizon;
                    if (needs_reference(*problem)) {
                        for (const LadderRow& r : ladder) {
                            if (r.n_cells >= config.reference_res) {
                                throw DomainError("reference resolution must be finer than every study mesh");
                            }
                        }
                        ReferenceKey key{config.problem, alpha, eps, theta, config.reference_res, config.horizon};
                        ref = cached_reference(cache, key, config.newton);
                    }
                } catch (const std::exception& e) {
                    block_error = e.what();
                }
                for (const LadderRow& r : ladder) {
                    std::optional<OperatorSet> ops;
                    std::string row_error = block_error;
                    if (row_error.empty()) {
                        try {
                            ops = build_operator_set(TensorMesh2D::unit_square(r.n_cells), problem->order, eps);
                        } catch (const std::exception& e) {
                            row_error = e.what();
                        }
                    }
                    for (bool ttm : methods) {
                        ReportRow row;
                        row.problem = config.problem;
                        row.method = ttm ? "ttm" : "fe";
                        row.alpha = alpha;
                        row.theta = theta;
                        row.epsilon = eps;
                        row.h = 1.0 / r.n_cells;
                        row.tau = r.tau;
                        row.tau_c = ttm ? r.tau_c : r.tau;
                        row.M = ttm ? r.M : 1;
                        if (!row_error.empty()) {
                            row.status = "error: " + row_error;
                            report.rows.push_back(row);
                            continue;
                        }
                        try {
                            if (ttm && r.M < 2) {
                                throw DomainError("TT-M needs M >= 2");
                            }
                            DiscretizationConfig disc;
                            disc.n_cells = r.n_cells;
                            disc.tau = r.tau;
                            disc.M = ttm ? r.M : 1;
                            disc.theta = theta;
                            disc.newton = config.newton;
                            disc.linear = config.linear;
                            const CellResult res = run_cell(*problem, *ops, disc, ttm, config.timing_runs,
                                                            ref ? &*ref : nullptr);
                            row.err_l2 = res.err_l2;
                            row.err_mu = res.err_mu;
                            row.cpu_s = res.cpu;
                        } catch (const std::exception& e) {
                            row.status = std::string("error: ") + e.what();
                        }
                        report.rows.push_back(row);
                    }
                }
                add_rates(report, block);
            }
        }
    }
    return report;
}

ConvergenceReport run_m_study(const StudyConfig& config) {
    ConvergenceReport report;
    if (config.hs.empty() || config.Ms.empty()) {
        return report;
    }
    const double alpha = config.alphas.at(0);
    const double theta = config.thetas.at(0);
    const double eps = config.epsilons.at(0);
    const int n = cells_from_h(config.hs[0]);
    double tau = 0.0;
    if (!config.taus.empty()) {
        tau = config.taus[0];
    } else if (!config.tau_cs.empty()) {
        tau = config.tau_cs[0] / config.Ms[0];
    } else {
        throw DomainError("m-sweep: need --tau or --tau-c");
    }

    ProblemSpec problem = make_problem(config.problem, alpha, eps);
    problem.horizon = config.horizon;
    std::optional<ReferenceSolution> ref;
    if (needs_reference(problem)) {
        if (n >= config.reference_res) {
            throw DomainError("reference resolution must be finer than the study mesh");
        }
        ref = cached_reference(resolve_cache_dir(config.cache_dir),
                               {config.problem, alpha, eps, theta, config.reference_res, config.horizon},
                               config.newton);
    }
    const OperatorSet ops = build_operator_set(TensorMesh2D::unit_square(n), problem.order, eps);
    for (int M : config.Ms) {
        ReportRow row;
        row.problem = config.problem;
        row.method = M == 1 ? "fe" : "ttm";
        row.alpha = alpha;
        row.theta = theta;
        row.epsilon = eps;
        row.h = 1.0 / n;
        row.tau = tau;
        row.tau_c = M * tau;
        row.M = M;
        try {
            if (M < 1) {
                throw DomainError("M must be positive");
            }
            DiscretizationConfig disc;
            disc.n_cells = n;
            disc.tau = tau;
            disc.M = M;
            disc.theta = theta;
            disc.newton = config.newton;
            disc.linear = config.linear;
            const CellResult res = run_cell(problem, ops, disc, M >= 2, config.timing_runs, ref ? &*ref : nullptr);
            row.err_l2 = res.err_l2;
            row.err_mu = res.err_mu;
            row.cpu_s = res.cpu;
        } catch (const std::exception& e) {
            row.status = std::string("error: ") + e.what();
        }
        report.rows.push_back(row);
    }
    return report;
}

std::string ReferenceKey::describe() const {
    return problem + "|alpha=" + fmt(alpha) + "|epsilon=" + fmt(epsilon) + "|theta=" + fmt(theta) +
           "|h=1/" + std::to_string(resolution) + "|tau=1/" + std::to_string(resolution) +
           "|T=" + fmt(horizon);
}

std::uint64_t ReferenceKey::hash() const {
    // FNV-1a over the canonical description and the format version.
    std::uint64_t h = 1469598103934665603ull;
    const std::string s = describe() + "|v" + std::to_string(kReferenceFormatVersion);
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

ReferenceSolution build_reference(const ReferenceKey& key, const NewtonConfig& newton) {
    if (key.resolution < 2) {
        throw DomainError("build_reference: resolution must be at least 2");
    }
    ProblemSpec problem = make_problem(key.problem, key.alpha, key.epsilon);
    problem.horizon = key.horizon;
    DiscretizationConfig disc;
    disc.n_cells = key.resolution;
    disc.tau = 1.0 / key.resolution;
    disc.theta = key.theta;
    disc.newton = newton;
    disc.linear.kind = SolverKind::iterative;
    disc.keep_trajectory = true;
    const TensorMesh2D mesh = TensorMesh2D::unit_square(key.resolution);
    const OperatorSet ops = build_operator_set(mesh, problem.order, problem.epsilon);
    FeRun run = run_standard_fe(problem, disc, ops);

    ReferenceSolution ref{key, mesh, {}};
    const int steps = static_cast<int>(run.states.size()) - 1;
    const int stride = std::max(1, steps / 8);
    for (int k = 0; k <= steps; ++k) {
        if (k % stride == 0 || k == steps) {
            ref.checkpoints.push_back(std::move(run.states[k]));
        }
    }
    return ref;
}

namespace {

constexpr char kMagic[8] = {'F', 'R', 'T', 'T', 'M', 'R', 'E', 'F'};

template <class T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
bool get(std::istream& is, T& v) {
    return static_cast<bool>(is.read(reinterpret_cast<char*>(&v), sizeof v));
}

}  // namespace

void save_reference(const std::string& path, const ReferenceSolution& ref) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) {
            throw std::runtime_error("cannot open " + tmp + " for writing");
        }
        os.write(kMagic, sizeof kMagic);
        put(os, kReferenceFormatVersion);
        put(os, ref.key.hash());
        const std::string desc = ref.key.describe();
        put(os, static_cast<std::uint32_t>(desc.size()));
        os.write(desc.data(), static_cast<std::streamsize>(desc.size()));
        put(os, static_cast<std::int32_t>(ref.mesh.x().n_cells()));
        put(os, static_cast<std::uint32_t>(ref.checkpoints.size()));
        for (const StateVector& s : ref.checkpoints) {
            put(os, s.time);
            put(os, static_cast<std::uint32_t>(s.coeffs.size()));
            os.write(reinterpret_cast<const char*>(s.coeffs.data()),
                     static_cast<std::streamsize>(s.coeffs.size() * sizeof(double)));
        }
        if (!os) {
            throw std::runtime_error("write to " + tmp + " failed");
        }
    }
    std::filesystem::rename(tmp, path);
}

std::optional<ReferenceSolution> load_reference(const std::string& path, const ReferenceKey& key) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        return std::nullopt;
    }
    char magic[8];
    if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
        return std::nullopt;
    }
    std::uint32_t version = 0;
    std::uint64_t hash = 0;
    std::uint32_t desc_len = 0;
    if (!get(is, version) || version != kReferenceFormatVersion || !get(is, hash) || hash != key.hash() ||
        !get(is, desc_len) || desc_len > 4096) {
        return std::nullopt;
    }
    std::string desc(desc_len, '\0');
    if (!is.read(desc.data(), desc_len) || desc != key.describe()) {
        return std::nullopt;
    }
    std::int32_t n_cells = 0;
    std::uint32_t count = 0;
    if (!get(is, n_cells) || n_cells != key.resolution || !get(is, count) || count == 0) {
        return std::nullopt;
    }
    ReferenceSolution ref{key, TensorMesh2D::unit_square(n_cells), {}};
    const auto dofs = static_cast<std::uint32_t>(ref.mesh.dofs());
    for (std::uint32_t k = 0; k < count; ++k) {
        StateVector s;
        std::uint32_t len = 0;
        if (!get(is, s.time) || !get(is, len) || len != dofs) {
            return std::nullopt;
        }
        s.coeffs.resize(len);
        if (!is.read(reinterpret_cast<char*>(s.coeffs.data()), static_cast<std::streamsize>(len * sizeof(double)))) {
            return std::nullopt;
        }
        ref.checkpoints.push_back(std::move(s));
    }
    return ref;
}

std::string reference_file_name(const ReferenceKey& key) {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(key.hash()));
    return key.problem + "_r" + std::to_string(key.resolution) + "_" + hex + ".bin";
}

ReferenceSolution cached_reference(const std::string& dir, const ReferenceKey& key, const NewtonConfig& newton) {
    if (dir.empty()) {
        return build_reference(key, newton);
    }
    const std::filesystem::path path = std::filesystem::path(dir) / reference_file_name(key);
    if (auto hit = load_reference(path.string(), key)) {
        return *hit;
    }
    ReferenceSolution ref = build_reference(key, newton);
    std::filesystem::create_directories(dir);
    save_reference(path.string(), ref);
    return ref;
}

void emit_surface(const SpaceFn& f, const TensorMesh2D& mesh, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    std::fprintf(fp, "x y value\n");
    for (int j = 0; j <= mesh.y().n_cells(); ++j) {
        const double y = mesh.y().node(j);
        for (int i = 0; i <= mesh.x().n_cells(); ++i) {
            const double x = mesh.x().node(i);
            std::fprintf(fp, "%.17g %.17g %.17g\n", x, y, f(x, y));
        }
    }
    const bool ok = std::ferror(fp) == 0;
    if (std::fclose(fp) != 0 || !ok) {
        throw std::runtime_error("write to " + path + " failed");
    }
}

void emit_surface(const StateVector& state, const TensorMesh2D& mesh, const std::string& path) {
    if (state.coeffs.size() != mesh.dofs()) {
        throw ShapeError("emit_surface: state does not match the mesh");
    }
    const int nx = mesh.x().n_cells();
    const int ny = mesh.y().n_cells();
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    std::fprintf(fp, "x y value\n");
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            const bool interior = i > 0 && i < nx && j > 0 && j < ny;
            const double v = interior ? state.coeffs[mesh.dof(i - 1, j - 1)] : 0.0;
            std::fprintf(fp, "%.17g %.17g %.17g\n", mesh.x().node(i), mesh.y().node(j), v);
        }
    }
    const bool ok = std::ferror(fp) == 0;
    if (std::fclose(fp) != 0 || !ok) {
        throw std::runtime_error("write to " + path + " failed");
    }
}

std::vector<SurfacePoint> parse_surface(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        throw std::runtime_error("cannot open " + path);
    }
    std::string line;
    if (!std::getline(is, line) || line != "x y value") {
        throw std::runtime_error(path + ": missing surface header");
    }
    std::vector<SurfacePoint> pts;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        const char* p = line.c_str();
        char* end = nullptr;
        SurfacePoint s{};
        s.x = std::strtod(p, &end);
        p = end;
        s.y = std::strtod(p, &end);
        p = end;
        s.value = std::strtod(p, &end);
        if (end == p) {
            throw std::runtime_error(path + ": malformed line '" + line + "'");
        }
        pts.push_back(s);
    }
    return pts;
}

}  // namespace fracttm
