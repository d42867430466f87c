#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace gssd {

/// Numeric table read from CSV text with a header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t columns() const noexcept { return header.size(); }
  std::vector<double> column(std::size_t j) const;
};

/// Comma-separated, header required, blank lines skipped, CRLF accepted.
/// Throws Parse on a missing header, a non-numeric field or a ragged row.
CsvTable parse_csv(const std::string& text);
CsvTable read_csv_file(const std::string& path);

/// Two instruments measuring the same quantity on different scales:
/// W1 = X + U1, W2 = mu + sigma (X + U2).
struct PairedEstimate {
  std::vector<double> w;  ///< (W1 + (W2 - mu)/sigma) / 2
  double mu = 0.0;
  double sigma = 1.0;
  double sigma_u2 = 0.0;        ///< per-instrument error variance
  double error_variance = 0.0;  ///< variance of the averaged error, sigma_u2 / 2
  double signal_variance = 0.0; ///< Var(w) - error_variance
  double nsr = 0.0;
  std::size_t rows = 0;
};

PairedEstimate harmonize_pairs(std::span<const double> w1, std::span<const double> w2);
PairedEstimate harmonize_pairs(const CsvTable& table);

/// Per-exam transform W_j = log(P_j - shift), or P_j - shift without the log.
struct ReplicateTransform {
  double shift = 50.0;
  bool log = true;
};

struct ReplicateEstimate {
  std::vector<double> w;  ///< (W_1 + W_2) / 2 per accepted row
  double sigma_x = 0.0;
  double sigma_u = 0.0;         ///< error SD of w
  double error_variance = 0.0;  ///< sigma_u^2
  double nsr = 0.0;
  std::size_t rows = 0;      ///< accepted rows
  std::size_t rejected = 0;  ///< rows outside the transform domain
  std::vector<std::size_t> rejected_rows;  ///< zero-based data-row indices
  bool within_exam = false;  ///< error variance from within-exam replicates
};

/// Two columns: exam means P_1, P_2; the error variance of w is a quarter of
/// the variance of W_1 - W_2. Four columns: two replicates per exam,
/// P_j = mean of its pair; the error variance is estimated from
/// within-exam differences of the transformed single readings.
ReplicateEstimate replicate_average(const CsvTable& table, ReplicateTransform transform = {});

}  // namespace gssd
