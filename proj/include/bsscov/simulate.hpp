#ifndef BSSCOV_SIMULATE_HPP
#define BSSCOV_SIMULATE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bsscov/gaussian_family.hpp"
#include "bsscov/kernel.hpp"

namespace bsscov {

struct GridSpec {
    double T = 1.0;     // horizon
    long n = 1;         // steps per unit time
    double warmup = 0;  // truncated past window (time units), Riemann scheme only

    GridSpec() = default;
    GridSpec(double T_, long n_, double warmup_ = 0.0);
    long steps() const; // N = floor(n T)
    double dt() const { return 1.0 / static_cast<double>(n); }
};

enum class PathKind { Levels, Increments };

struct PathMeta {
    std::uint64_t seed = 0;
    long path_index = 0;
    std::string regime;        // "gaussian-core" | "bss-Y" | "bss-X"
    std::string scheme;        // "exact" | "riemann"
    std::string volatility_id = "none";
    std::string drift_id = "none";
    double warmup = 0.0;
};

/// Simulated or ingested paths on a uniform grid. Levels hold N+1 rows
/// (including t = 0); increments hold N rows.
struct PathBundle {
    GridSpec grid;
    PathKind kind = PathKind::Levels;
    Eigen::MatrixXd values;
    std::vector<std::string> labels;
    PathMeta meta;

    int components() const { return static_cast<int>(values.cols()); }
    Eigen::MatrixXd increments() const; // N x p
    Eigen::MatrixXd levels() const;     // (N+1) x p, starting at 0 for increments
    void validate() const;
};

// ---- volatility / drift models -------------------------------------------

struct VolatilityModel {
    enum class Kind { Constant, DeterministicSine, SmoothStochastic };
    Kind kind = Kind::Constant;
    double c = 1.0;          // Constant level / base amplitude
    double amp = 0.0;        // DeterministicSine relative amplitude, |amp| < 1
    double omega = 0.0;      // DeterministicSine angular frequency
    double vol_of_vol = 0.5; // SmoothStochastic exponent scale
    double ar_timescale = 1.0;   // AR driver mean-reversion time
    double window = 0.5;         // moving-average integration window (time)

    static VolatilityModel constant(double c);
    static VolatilityModel deterministic_sine(double base, double amp, double omega);
    static VolatilityModel smooth_stochastic(double base, double vol_of_vol,
                                             double ar_timescale, double window);
    void validate() const;
    bool is_constant() const { return kind == Kind::Constant; }
    bool is_random() const { return kind == Kind::SmoothStochastic; }
    double deterministic_value(double t) const; // Constant / DeterministicSine
    std::string id() const;
};

struct DriftModel {
    enum class Kind { Zero, SmoothIntegrated };
    Kind kind = Kind::Zero;
    double scale = 0.0;
    double ar_timescale = 1.0;

    static DriftModel zero();
    static DriftModel smooth_integrated(double scale, double ar_timescale);
    bool is_zero() const { return kind == Kind::Zero; }
    std::string id() const;
};

// ---- exact Gaussian simulation --------------------------------------------

inline constexpr long kDefaultSizeCap = 6000;

/// Covariance of the stacked increment vector (component a, step i) ->
/// row (a-1)*N + i. Toeplitz blocks: only 2N-1 distinct lags per pair.
Eigen::MatrixXd build_core_covariance(const GaussianFamily& family,
                                      const GridSpec& grid,
                                      long size_cap = kDefaultSizeCap);

/// Factorizes once, then draws paths from per-path substreams; jitter
/// ridge 1e-12*trace/dim escalating x10 to 1e-8 before NotPSD.
class CoreSimulator {
  public:
    CoreSimulator(const GaussianFamily& family, const GridSpec& grid,
                  long size_cap = kDefaultSizeCap);
    CoreSimulator(Eigen::MatrixXd covariance, int n_components, GridSpec grid);

    /// Increment sample for one path, N x m; deterministic in (seed, path).
    Eigen::MatrixXd draw_increments(std::uint64_t seed, long path_index) const;
    PathBundle draw(std::uint64_t seed, long path_index) const;
    int n_components() const { return m_; }
    const GridSpec& grid() const { return grid_; }

  private:
    void factorize(Eigen::MatrixXd cov);
    GridSpec grid_;
    int m_;
    Eigen::MatrixXd chol_; // lower triangular
};

std::vector<PathBundle> simulate_gaussian_core(const Eigen::MatrixXd& cov,
                                               int n_components, const GridSpec& grid,
                                               long M, std::uint64_t seed);
std::vector<PathBundle> simulate_gaussian_core(const GaussianFamily& family,
                                               const GridSpec& grid, long M,
                                               std::uint64_t seed,
                                               long size_cap = kDefaultSizeCap);

// ---- BSS simulation --------------------------------------------------------

enum class BssVariant { MatrixY, ElementwiseX };
enum class BssScheme { Auto, Exact, Riemann };

struct BssModel {
    BssVariant variant = BssVariant::MatrixY;
    std::vector<VolatilityModel> volatility; // p*p row-major sigma^(r,m)
    std::vector<DriftModel> drift;           // per component
    BssScheme scheme = BssScheme::Auto;

    static BssModel constant_sigma(BssVariant v, int p, const Eigen::MatrixXd& sigma);
    static BssModel unit_sigma(BssVariant v, int p);
    const VolatilityModel& vol(int r, int m, int p) const;
    bool all_constant_sigma() const;
    bool all_zero_drift() const;
    Eigen::MatrixXd sigma_matrix(int p) const; // constants only
    void validate(int p) const;
};

/// Discretized multivariate BSS paths. Constant sigma + Auto/Exact runs the
/// exact stationary Gaussian construction; otherwise a left-endpoint
/// Riemann convolution over [-warmup, T].
std::vector<PathBundle> simulate_bss(const KernelSpec& spec, const BssModel& model,
                                     const GridSpec& grid, long M, std::uint64_t seed,
                                     long size_cap = kDefaultSizeCap);

/// Volatility sample paths on the observation grid (N+1 values per cell),
/// reproduced from the same substreams simulate_bss uses; needed by bias
/// terms when sigma is random.
std::vector<Eigen::MatrixXd> volatility_paths(const BssModel& model, int p,
                                              const GridSpec& grid, long M,
                                              std::uint64_t seed);

} // namespace bsscov

#endif
