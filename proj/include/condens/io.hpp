#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "condens/density.hpp"
#include "condens/estimate.hpp"
#include "condens/fourier.hpp"
#include "condens/mc.hpp"
#include "condens/model.hpp"

namespace condens {

using Json = nlohmann::ordered_json;

/// Series file: header `k,re,im` or `k,s_re,s_im,a_re,a_im`.
struct SeriesTable {
    std::vector<Complex> s; ///< empty for a plain `k,re,im` file
    std::vector<Complex> a;
};

void write_series_csv(std::ostream& os, std::span<const Complex> s, std::span<const Complex> a);
void write_series_csv(std::ostream& os, std::span<const Complex> a);
/// Throws ContractError on a malformed header, non-consecutive k or bad numbers.
SeriesTable read_series_csv(std::istream& is);

/// One row `x,y,potential,density` per interior node, x fastest.
void write_density_csv(std::ostream& os, const DensityField& field);
/// P2 ASCII image of the density, 0..255 scaled linearly to the maximum; top row is the largest y.
void write_pgm(std::ostream& os, const DensityField& field);

/// {"components": [{"c": [re, im], "xi": [re, im]}, ...]}. Unknown keys are rejected.
ExponentialModel model_from_json(const Json& j);
Json to_json(const ExponentialModel& model);

Json to_json(const EstimateResult& r);
Json to_json(const PiecewiseConstant& f);
Json to_json(const Chi2Report& r);
Json to_json(const LaguerreFitReport& r);
Json to_json(const MonotonicityReport& r);
Json to_json(const BenchReport& r);
Json to_json(const Selection& s);

/// parameter,truth_re,truth_im,bias_re,bias_im,sd,mse
void write_stats_csv(std::ostream& os, const ReplicateStats& stats);
/// t,F_rough,F_reconstructed
void write_reconstruction_csv(std::ostream& os, const Reconstruction& r);
/// p,fast_seconds_per_point,direct_seconds_per_point,max_rel_deviation
void write_bench_csv(std::ostream& os, const BenchReport& r);

/// Throws ContractError naming the first key of `j` not in `allowed`.
void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where);

Json complex_json(Complex z);
Complex complex_from_json(const Json& j, const std::string& where);

} // namespace condens
