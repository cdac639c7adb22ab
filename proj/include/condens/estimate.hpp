#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "condens/density.hpp"
#include "condens/model.hpp"

namespace condens {

/// Strict local maximum of a density field. (i, j) index the interior array.
struct Peak {
    Complex z;
    double value;
    std::size_t i;
    std::size_t j;
};

enum class Neighbourhood { Eight, Four };

/// Interior nodes strictly greater than all 8 neighbours, sorted by decreasing value.
/// Nodes on the border of the interior array have fewer neighbours and are compared
/// against those that exist. Nonpositive values are never peaks.
std::vector<Peak> local_maxima(const DensityField& field, Neighbourhood hood = Neighbourhood::Eight);

/// Peak location moved by a separable three-point parabola fit in x and y,
/// with each offset clamped to half a cell. Peaks on the border of the
/// interior array are returned unchanged along the missing direction.
Complex refine_peak(const DensityField& field, const Peak& peak);

/// Condition number of the column-normalized Vandermonde matrix above which a fit is rejected.
inline constexpr double kVandermondeConditionLimit = 1e12;

struct LsFit {
    std::vector<Complex> c;
    double residual = 0.0;  ///< ||V c - a||_2
    double condition = 1.0; ///< 2-norm condition of V with unit-norm columns
    std::vector<double> leverage; ///< diagonal of the hat matrix V (V^H V)^-1 V^H
};

/// Least squares amplitudes for V[k][j] = xi_j^k, k = 0..n-1, through a
/// Householder QR of the column-normalized V. Throws EstimationError when the
/// condition estimate exceeds kVandermondeConditionLimit.
LsFit vandermonde_ls(std::span<const Complex> xi, std::span<const Complex> a);

enum class SelectionRule {
    /// Smallest residual over all prefixes (always the largest accepted prefix,
    /// since the fits are nested). Kept for comparison.
    MinResidual,
    /// Smallest leave-one-out prediction residual sum_k |e_k / (1 - h_kk)|^2.
    LeaveOneOut,
};

struct SelectionOptions {
    std::size_t max_candidates = 0; ///< 0 means 2p
    SelectionRule rule = SelectionRule::LeaveOneOut;
    bool refine = false; ///< sub-grid refinement of the peak locations
};

struct PrefixScore {
    std::size_t q;
    bool accepted;   ///< false when the Vandermonde guard rejected the prefix
    double residual; ///< ||V c - a||_2, NaN when rejected
    double score;    ///< criterion minimized by the selection rule, NaN when rejected
};

struct Selection {
    std::size_t q = 0;
    double threshold = 0.0;
    LsFit fit;
    std::vector<PrefixScore> prefixes;
};

/// Fits every prefix of the top peaks and keeps the one with the best data fit.
/// Throws EstimationError when every prefix is rejected.
Selection threshold_select(std::span<const Peak> peaks, const NoisySeries& a, const SelectionOptions& options = {});

/// Significance level for EstimateResult::fit_ratio.
inline constexpr double kSignificanceRatio = 15.0;

struct EstimateResult {
    std::size_t p_hat = 0;
    std::vector<Complex> xi;
    std::vector<Complex> c;
    double residual = 0.0;
    double threshold = 0.0;
    /// Explained-to-residual energy ratio (||a||^2 - r^2) / r^2 * (n - p_hat) / p_hat.
    double fit_ratio = 0.0;
    /// fit_ratio above kSignificanceRatio: the fit removes clearly more than noise.
    bool significant = true;
};

/// local_maxima, threshold_select, vandermonde_ls on the chosen prefix.
EstimateResult estimate_model(const DensityField& field, const NoisySeries& a, const SelectionOptions& options = {});

/// Same pipeline with the number of components fixed by the caller.
EstimateResult estimate_model_fixed(const DensityField& field, const NoisySeries& a, std::size_t p_hat,
                                    bool refine = false);

struct ParameterStat {
    std::string parameter;
    Complex truth;
    Complex bias;
    double sd = 0.0;
    double mse = 0.0;
};

struct ReplicateStats {
    std::vector<ParameterStat> rows; ///< p*, then xi_1..xi_p*, then c_1..c_p*
    std::size_t used = 0;
    std::size_t discarded = 0;
};

/// Table-style bias / sd / MSE. Each true node is matched to the nearest
/// estimated node. A replicate is discarded when p_hat < p* or when one
/// estimate is the nearest to two true nodes. The p* row uses every replicate.
ReplicateStats score_replicates(std::span<const EstimateResult> results, const ExponentialModel& truth);

} // namespace condens
