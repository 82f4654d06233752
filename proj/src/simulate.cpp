#include "bsscov/simulate.hpp"
#include "bsscov/errors.hpp"
#include "bsscov/rng.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace bsscov {

GridSpec::GridSpec(double T_, long n_, double warmup_) : T(T_), n(n_), warmup(warmup_) {
    if (!(T > 0.0)) throw DomainError("GridSpec: T must be positive");
    if (n < 1) throw DomainError("GridSpec: n must be >= 1");
    if (warmup < 0.0) throw DomainError("GridSpec: warmup must be >= 0");
}

long GridSpec::steps() const { return static_cast<long>(std::floor(n * T)); }

Eigen::MatrixXd PathBundle::increments() const {
    if (kind == PathKind::Increments) return values;
    const long N = values.rows() - 1;
    return values.bottomRows(N) - values.topRows(N);
}

Eigen::MatrixXd PathBundle::levels() const {
    if (kind == PathKind::Levels) return values;
    Eigen::MatrixXd lv(values.rows() + 1, values.cols());
    lv.row(0).setZero();
    for (long i = 0; i < values.rows(); ++i) lv.row(i + 1) = lv.row(i) + values.row(i);
    return lv;
}

void PathBundle::validate() const {
    const long expect = grid.steps() + (kind == PathKind::Levels ? 1 : 0);
    if (values.rows() != expect)
        throw DimensionMismatch("PathBundle: row count does not match the grid");
    if (!values.allFinite()) throw SchemaError("PathBundle: non-finite values");
}

// ---- models ----------------------------------------------------------------

VolatilityModel VolatilityModel::constant(double c) {
    VolatilityModel m;
    m.kind = Kind::Constant;
    m.c = c;
    m.validate();
    return m;
}

VolatilityModel VolatilityModel::deterministic_sine(double base, double amp, double omega) {
    VolatilityModel m;
    m.kind = Kind::DeterministicSine;
    m.c = base;
    m.amp = amp;
    m.omega = omega;
    m.validate();
    return m;
}

VolatilityModel VolatilityModel::smooth_stochastic(double base, double vol_of_vol,
                                                   double ar_timescale, double window) {
    VolatilityModel m;
    m.kind = Kind::SmoothStochastic;
    m.c = base;
    m.vol_of_vol = vol_of_vol;
    m.ar_timescale = ar_timescale;
    m.window = window;
    m.validate();
    return m;
}

void VolatilityModel::validate() const {
    switch (kind) {
        case Kind::Constant:
            // zero is allowed as a structural zero inside a sigma grid;
            // all-dead components are rejected at the model level
            if (!(c >= 0.0)) throw InvalidModel("VolatilityModel: constant must be >= 0");
            break;
        case Kind::DeterministicSine:
            if (!(c > 0.0) || std::abs(amp) >= 1.0)
                throw InvalidModel("VolatilityModel: need base > 0 and |amp| < 1");
            break;
        case Kind::SmoothStochastic:
            if (!(c > 0.0) || !(ar_timescale > 0.0) || !(window > 0.0))
                throw InvalidModel("VolatilityModel: need positive base/timescale/window");
            break;
    }
}

double VolatilityModel::deterministic_value(double t) const {
    switch (kind) {
        case Kind::Constant: return c;
        case Kind::DeterministicSine: return c * (1.0 + amp * std::sin(omega * t));
        default:
            throw InvalidModel("VolatilityModel: stochastic sigma has no deterministic value");
    }
}

std::string VolatilityModel::id() const {
    switch (kind) {
        case Kind::Constant: return "const(" + std::to_string(c) + ")";
        case Kind::DeterministicSine:
            return "sine(" + std::to_string(c) + "," + std::to_string(amp) + "," +
                   std::to_string(omega) + ")";
        case Kind::SmoothStochastic:
            return "smooth(" + std::to_string(c) + "," + std::to_string(vol_of_vol) + ")";
    }
    return "?";
}

DriftModel DriftModel::zero() { return {}; }

DriftModel DriftModel::smooth_integrated(double scale, double ar_timescale) {
    DriftModel d;
    d.kind = Kind::SmoothIntegrated;
    d.scale = scale;
    d.ar_timescale = ar_timescale;
    if (!(ar_timescale > 0.0)) throw InvalidModel("DriftModel: ar_timescale > 0");
    return d;
}

std::string DriftModel::id() const {
    return kind == Kind::Zero ? "zero" : "smooth-integrated(" + std::to_string(scale) + ")";
}

// ---- exact Gaussian simulation ---------------------------------------------

Eigen::MatrixXd build_core_covariance(const GaussianFamily& family,
                                      const GridSpec& grid, long size_cap) {
    const long N = grid.steps();
    const int m = family.size();
    const long dim = N * m;
    if (dim > size_cap)
        throw SizeCap("build_core_covariance: N*components = " + std::to_string(dim) +
                      " exceeds cap " + std::to_string(size_cap));
    LagTable lags(family, grid.n, N - 1);
    Eigen::MatrixXd cov(dim, dim);
    for (int a = 1; a <= m; ++a)
        for (int b = 1; b <= m; ++b)
            for (long i = 0; i < N; ++i)
                for (long j = 0; j < N; ++j)
                    cov((a - 1) * N + i, (b - 1) * N + j) = lags.cov(a, b, j - i);
    // numerical symmetrization: quadrature noise on C_ab vs C_ba
    cov = ((cov + cov.transpose()) * 0.5).eval();
    return cov;
}

CoreSimulator::CoreSimulator(const GaussianFamily& family, const GridSpec& grid,
                             long size_cap)
    : grid_(grid), m_(family.size()) {
    factorize(build_core_covariance(family, grid, size_cap));
}

CoreSimulator::CoreSimulator(Eigen::MatrixXd covariance, int n_components, GridSpec grid)
    : grid_(grid), m_(n_components) {
    if (covariance.rows() != covariance.cols())
        throw DimensionMismatch("CoreSimulator: covariance must be square");
    if (covariance.rows() != grid.steps() * n_components)
        throw DimensionMismatch("CoreSimulator: covariance size != N * components");
    factorize(std::move(covariance));
}

void CoreSimulator::factorize(Eigen::MatrixXd cov) {
    const long dim = cov.rows();
    double ridge = 1e-12 * cov.trace() / static_cast<double>(dim);
    const double ridge_max = 1e-8 * cov.trace() / static_cast<double>(dim);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    while (llt.info() != Eigen::Success) {
        if (ridge > ridge_max)
            throw NotPSD("CoreSimulator: factorization failed after jitter escalation");
        cov.diagonal().array() += ridge;
        llt.compute(cov);
        ridge *= 10.0;
    }
    chol_ = llt.matrixL();
}

Eigen::MatrixXd CoreSimulator::draw_increments(std::uint64_t seed, long path_index) const {
    const long N = grid_.steps();
    NormalStream normals(substream_key(seed, static_cast<std::uint64_t>(path_index), 0));
    Eigen::VectorXd z(N * m_);
    for (long i = 0; i < z.size(); ++i) z(i) = normals.next();
    const Eigen::VectorXd x = chol_ * z;
    Eigen::MatrixXd inc(N, m_);
    for (int a = 0; a < m_; ++a) inc.col(a) = x.segment(a * N, N);
    return inc;
}

PathBundle CoreSimulator::draw(std::uint64_t seed, long path_index) const {
    PathBundle b;
    b.grid = grid_;
    b.kind = PathKind::Increments;
    b.values = draw_increments(seed, path_index);
    b.labels.resize(m_);
    for (int a = 0; a < m_; ++a) b.labels[a] = "C" + std::to_string(a + 1);
    b.meta.seed = seed;
    b.meta.path_index = path_index;
    b.meta.regime = "gaussian-core";
    b.meta.scheme = "exact";
    return b;
}

std::vector<PathBundle> simulate_gaussian_core(const Eigen::MatrixXd& cov,
                                               int n_components, const GridSpec& grid,
                                               long M, std::uint64_t seed) {
    CoreSimulator sim(cov, n_components, grid);
    std::vector<PathBundle> out;
    out.reserve(static_cast<std::size_t>(M));
    for (long m = 0; m < M; ++m) out.push_back(sim.draw(seed, m));
    return out;
}

std::vector<PathBundle> simulate_gaussian_core(const GaussianFamily& family,
                                               const GridSpec& grid, long M,
                                               std::uint64_t seed, long size_cap) {
    CoreSimulator sim(family, grid, size_cap);
    std::vector<PathBundle> out;
    out.reserve(static_cast<std::size_t>(M));
    for (long m = 0; m < M; ++m) out.push_back(sim.draw(seed, m));
    return out;
}

// ---- BSS -------------------------------------------------------------------

BssModel BssModel::constant_sigma(BssVariant v, int p, const Eigen::MatrixXd& sigma) {
    if (sigma.rows() != p || sigma.cols() != p)
        throw DimensionMismatch("BssModel::constant_sigma: sigma must be p x p");
    BssModel m;
    m.variant = v;
    for (int r = 0; r < p; ++r)
        for (int c = 0; c < p; ++c)
            m.volatility.push_back(VolatilityModel::constant(sigma(r, c)));
    m.drift.assign(static_cast<std::size_t>(p), DriftModel::zero());
    return m;
}

BssModel BssModel::unit_sigma(BssVariant v, int p) {
    return constant_sigma(v, p, Eigen::MatrixXd::Ones(p, p));
}

const VolatilityModel& BssModel::vol(int r, int m, int p) const {
    if (r < 1 || r > p || m < 1 || m > p) throw OutOfRange("BssModel::vol");
    return volatility[static_cast<std::size_t>(r - 1) * p + (m - 1)];
}

bool BssModel::all_constant_sigma() const {
    for (const auto& v : volatility)
        if (!v.is_constant()) return false;
    return true;
}

bool BssModel::all_zero_drift() const {
    for (const auto& d : drift)
        if (!d.is_zero()) return false;
    return true;
}

Eigen::MatrixXd BssModel::sigma_matrix(int p) const {
    if (!all_constant_sigma())
        throw InvalidModel("BssModel::sigma_matrix: volatility is not constant");
    Eigen::MatrixXd s(p, p);
    for (int r = 1; r <= p; ++r)
        for (int m = 1; m <= p; ++m) s(r - 1, m - 1) = vol(r, m, p).c;
    return s;
}

void BssModel::validate(int p) const {
    if (volatility.size() != static_cast<std::size_t>(p) * p)
        throw InvalidModel("BssModel: volatility grid must be p x p");
    if (drift.size() != static_cast<std::size_t>(p))
        throw InvalidModel("BssModel: one drift model per component");
    for (const auto& v : volatility) v.validate();
    // fully dead volatility grid: nothing drives the process
    bool live = false;
    for (const auto& v : volatility) live = live || !v.is_constant() || v.c > 0.0;
    if (!live) throw InvalidModel("BssModel: volatility grid is identically zero");
    // per-component degeneracy (a zero row against an active kernel) surfaces
    // as DegenerateVariance in the scaling factors
}

namespace {

// AR(1) driver with per-step decay exp(-dt/timescale), stationary start.
struct ArDriver {
    double a, b;
    double x;
    NormalStream stream;
    ArDriver(double dt, double timescale, std::uint64_t key)
        : a(std::exp(-dt / timescale)), b(std::sqrt(1.0 - a * a)), x(0.0), stream(key) {
        x = stream.next();
    }
    double next() {
        x = a * x + b * stream.next();
        return x;
    }
};

// sigma^(r,m) path on a grid of `count` points spaced dt, first point at
// time t0. Adapted: value j uses driver noise up to j.
std::vector<double> sigma_path(const VolatilityModel& v, double t0, double dt,
                               long count, std::uint64_t key) {
    std::vector<double> out(static_cast<std::size_t>(count));
    if (!v.is_random()) {
        for (long j = 0; j < count; ++j)
            out[static_cast<std::size_t>(j)] = v.deterministic_value(t0 + j * dt);
        return out;
    }
    ArDriver drv(dt, v.ar_timescale, key);
    const long w = std::max<long>(1, std::lround(v.window / dt));
    std::vector<double> ring(static_cast<std::size_t>(w), 0.0);
    double winsum = 0.0;
    for (long j = 0; j < count; ++j) {
        const double xj = drv.next();
        winsum += xj - ring[static_cast<std::size_t>(j % w)];
        ring[static_cast<std::size_t>(j % w)] = xj;
        const double integrated = winsum * dt / (static_cast<double>(w) * dt);
        out[static_cast<std::size_t>(j)] = v.c * std::exp(v.vol_of_vol * integrated);
    }
    return out;
}

std::vector<double> drift_path(const DriftModel& d, double dt, long N, std::uint64_t key) {
    std::vector<double> U(static_cast<std::size_t>(N) + 1, 0.0);
    if (d.is_zero()) return U;
    ArDriver drv(dt, d.ar_timescale, key);
    double prev = d.scale * std::tanh(drv.next());
    for (long i = 1; i <= N; ++i) {
        const double cur = d.scale * std::tanh(drv.next());
        U[static_cast<std::size_t>(i)] =
            U[static_cast<std::size_t>(i - 1)] + 0.5 * dt * (prev + cur);
        prev = cur;
    }
    return U;
}

constexpr std::uint64_t kTagW = 100;
constexpr std::uint64_t kTagSigma = 1000;
constexpr std::uint64_t kTagDrift = 5000;

PathBundle riemann_path(const KernelSpec& spec, const BssModel& model,
                        const GridSpec& grid, std::uint64_t seed, long path) {
    const int p = spec.p;
    const long N = grid.steps();
    const double dt = grid.dt();
    const long W = std::max<long>(1, std::lround(grid.warmup * grid.n));
    const long H = W + N; // noise history length
    // Brownian increments per measure
    std::vector<std::vector<double>> dW(static_cast<std::size_t>(p));
    for (int m = 1; m <= p; ++m) {
        NormalStream s(substream_key(seed, static_cast<std::uint64_t>(path),
                                     kTagW + static_cast<std::uint64_t>(m)));
        auto& v = dW[static_cast<std::size_t>(m - 1)];
        v.resize(static_cast<std::size_t>(H));
        const double sd = std::sqrt(dt);
        for (long j = 0; j < H; ++j) v[static_cast<std::size_t>(j)] = sd * s.next();
    }
    // sigma paths on the extended grid, left endpoints s_j = (j - W) dt
    const double t0 = -static_cast<double>(W) * dt;
    std::vector<std::vector<double>> sig(static_cast<std::size_t>(p) * p);
    for (int r = 1; r <= p; ++r)
        for (int m = 1; m <= p; ++m)
            sig[static_cast<std::size_t>(r - 1) * p + (m - 1)] = sigma_path(
                model.vol(r, m, p), t0, dt, H,
                substream_key(seed, static_cast<std::uint64_t>(path),
                              kTagSigma + static_cast<std::uint64_t>((r - 1) * p + m)));
    // kernel values g(d * dt), d = 1..H
    std::vector<std::vector<double>> gv(static_cast<std::size_t>(p) * p);
    for (int a = 1; a <= p; ++a)
        for (int b = 1; b <= p; ++b) {
            const auto& cell = spec.at(a, b);
            if (!cell) continue;
            auto& v = gv[static_cast<std::size_t>(a - 1) * p + (b - 1)];
            v.resize(static_cast<std::size_t>(H) + 1, 0.0);
            for (long d = 1; d <= H; ++d)
                v[static_cast<std::size_t>(d)] = (*cell)(d * dt);
        }
    // modulated noise: variant Y collapses the measure sum first,
    // B_r(j) = sum_m sigma^(r,m)_j dW^m_j; variant X keeps (k,m) cells.
    Eigen::MatrixXd levels(N + 1, p);
    levels.setZero();
    std::vector<std::vector<double>> modulated;
    if (model.variant == BssVariant::MatrixY) {
        modulated.resize(static_cast<std::size_t>(p));
        for (int r = 1; r <= p; ++r) {
            auto& v = modulated[static_cast<std::size_t>(r - 1)];
            v.assign(static_cast<std::size_t>(H), 0.0);
            for (int m = 1; m <= p; ++m) {
                const auto& s = sig[static_cast<std::size_t>(r - 1) * p + (m - 1)];
                const auto& w = dW[static_cast<std::size_t>(m - 1)];
                for (long j = 0; j < H; ++j)
                    v[static_cast<std::size_t>(j)] +=
                        s[static_cast<std::size_t>(j)] * w[static_cast<std::size_t>(j)];
            }
        }
    } else {
        modulated.resize(static_cast<std::size_t>(p) * p);
        for (int k = 1; k <= p; ++k)
            for (int m = 1; m <= p; ++m) {
                auto& v = modulated[static_cast<std::size_t>(k - 1) * p + (m - 1)];
                v.assign(static_cast<std::size_t>(H), 0.0);
                const auto& s = sig[static_cast<std::size_t>(k - 1) * p + (m - 1)];
                const auto& w = dW[static_cast<std::size_t>(m - 1)];
                for (long j = 0; j < H; ++j)
                    v[static_cast<std::size_t>(j)] =
                        s[static_cast<std::size_t>(j)] * w[static_cast<std::size_t>(j)];
            }
    }
    for (int k = 1; k <= p; ++k) {
        for (long i = 0; i <= N; ++i) {
            double acc = 0.0;
            const long iabs = W + i; // absolute index of t_i on the noise grid
            for (int c = 1; c <= p; ++c) { // kernel column: r (variant Y) or m (variant X)
                const auto& g = gv[static_cast<std::size_t>(k - 1) * p + (c - 1)];
                if (g.empty()) continue;
                const auto& v = model.variant == BssVariant::MatrixY
                                    ? modulated[static_cast<std::size_t>(c - 1)]
                                    : modulated[static_cast<std::size_t>(k - 1) * p + (c - 1)];
                double sum = 0.0;
                for (long j = 0; j < iabs; ++j)
                    sum += g[static_cast<std::size_t>(iabs - j)] * v[static_cast<std::size_t>(j)];
                acc += sum;
            }
            levels(i, k - 1) = acc;
        }
        const auto U = drift_path(model.drift[static_cast<std::size_t>(k - 1)], dt, N,
                                  substream_key(seed, static_cast<std::uint64_t>(path),
                                                kTagDrift + static_cast<std::uint64_t>(k)));
        for (long i = 0; i <= N; ++i) levels(i, k - 1) += U[static_cast<std::size_t>(i)];
    }
    PathBundle b;
    b.grid = grid;
    b.kind = PathKind::Levels;
    b.values = std::move(levels);
    b.labels.resize(static_cast<std::size_t>(p));
    for (int a = 0; a < p; ++a) b.labels[static_cast<std::size_t>(a)] = "C" + std::to_string(a + 1);
    b.meta.seed = seed;
    b.meta.path_index = path;
    b.meta.regime = model.variant == BssVariant::MatrixY ? "bss-Y" : "bss-X";
    b.meta.scheme = "riemann";
    b.meta.volatility_id = model.volatility.front().id();
    b.meta.drift_id = model.drift.front().id();
    b.meta.warmup = grid.warmup;
    return b;
}

} // namespace

std::vector<PathBundle> simulate_bss(const KernelSpec& spec, const BssModel& model,
                                     const GridSpec& grid, long M, std::uint64_t seed,
                                     long size_cap) {
    model.validate(spec.p);
    const bool exact_ok = model.all_constant_sigma();
    BssScheme scheme = model.scheme;
    if (scheme == BssScheme::Auto) scheme = exact_ok ? BssScheme::Exact : BssScheme::Riemann;
    if (scheme == BssScheme::Exact && !exact_ok)
        throw InvalidModel("simulate_bss: exact scheme requires constant sigma");
    if (scheme == BssScheme::Riemann && !(grid.warmup > 0.0))
        throw InvalidModel("simulate_bss: Riemann scheme requires warmup > 0");

    std::vector<PathBundle> out;
    out.reserve(static_cast<std::size_t>(M));
    if (scheme == BssScheme::Exact) {
        const Eigen::MatrixXd sigma = model.sigma_matrix(spec.p);
        const GaussianFamily fam = model.variant == BssVariant::MatrixY
                                       ? y_const_sigma_family(spec, sigma)
                                       : x_const_sigma_family(spec, sigma);
        CoreSimulator sim(fam, grid, size_cap);
        for (long m = 0; m < M; ++m) {
            PathBundle b = sim.draw(seed, m);
            Eigen::MatrixXd lv = b.levels();
            for (int k = 1; k <= spec.p; ++k) {
                const auto U = drift_path(
                    model.drift[static_cast<std::size_t>(k - 1)], grid.dt(), grid.steps(),
                    substream_key(seed, static_cast<std::uint64_t>(m),
                                  kTagDrift + static_cast<std::uint64_t>(k)));
                for (long i = 0; i < lv.rows(); ++i)
                    lv(i, k - 1) += U[static_cast<std::size_t>(i)];
            }
            b.kind = PathKind::Levels;
            b.values = std::move(lv);
            b.meta.regime = model.variant == BssVariant::MatrixY ? "bss-Y" : "bss-X";
            b.meta.scheme = "exact";
            b.meta.volatility_id = model.volatility.front().id();
            b.meta.drift_id = model.drift.front().id();
            out.push_back(std::move(b));
        }
    } else {
        for (long m = 0; m < M; ++m) out.push_back(riemann_path(spec, model, grid, seed, m));
    }
    return out;
}

std::vector<Eigen::MatrixXd> volatility_paths(const BssModel& model, int p,
                                              const GridSpec& grid, long M,
                                              std::uint64_t seed) {
    const long N = grid.steps();
    const long W = std::max<long>(1, std::lround(grid.warmup * grid.n));
    const double dt = grid.dt();
    const double t0 = -static_cast<double>(W) * dt;
    std::vector<Eigen::MatrixXd> out;
    out.reserve(static_cast<std::size_t>(M));
    for (long path = 0; path < M; ++path) {
        Eigen::MatrixXd s(N + 1, p * p);
        for (int r = 1; r <= p; ++r)
            for (int m = 1; m <= p; ++m) {
                const auto full = sigma_path(
                    model.vol(r, m, p), t0, dt, W + N + 1,
                    substream_key(seed, static_cast<std::uint64_t>(path),
                                  kTagSigma + static_cast<std::uint64_t>((r - 1) * p + m)));
                for (long i = 0; i <= N; ++i)
                    s(i, (r - 1) * p + (m - 1)) = full[static_cast<std::size_t>(W + i)];
            }
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace bsscov
