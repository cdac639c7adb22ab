#pragma once

#include <string>

#include "condens/io.hpp"

namespace condens {

/// Runs one pipeline command from a JSON configuration and returns its report.
///
/// Every command accepts `seed`, `threads` and `output_dir` in addition to its
/// own keys; any other key is a ContractError. Output files are written below
/// `output_dir` unless given as absolute paths. The report embeds the
/// configuration with defaults filled in.
///
///   synth       model, n, sigma, convention, output
///   density     input | model, n, grid, sigma, beta, mc, kind, convention, output, pgm
///   estimate    input | model, n, grid, sigma, beta, p_hat, rule, max_candidates,
///               refine, replicates, convention, output, stats_output
///   reconstruct input | function, n, snr, sigma, n_breaks, grid, beta, wrap,
///               t_points, convention, output, report_output
///   validate    checks, chi2, laguerre, monotonicity, output
///   bench       ps, m, min_seconds, output, report_output
Json run_command(const std::string& name, const Json& config);

/// Grid from [x0, y0, delta, m] or {"x0", "y0", "delta", "m"}.
Grid grid_from_json(const Json& j);

} // namespace condens
