#include "gssdecon/ingestion.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "gssdecon/errors.hpp"

namespace gssd {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && errno == 0 && std::isfinite(out);
}

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sample variance with divisor n - 1.
double sample_variance(std::span<const double> v) {
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / static_cast<double>(v.size() - 1);
}

}  // namespace

std::vector<double> CsvTable::column(std::size_t j) const {
  if (j >= columns()) throw Error(ErrorKind::Domain, "column index out of range");
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[j]);
  return out;
}

CsvTable parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  CsvTable table;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto fields = split(line);
    if (!have_header) {
      bool numeric = true;
      double v = 0.0;
      for (const auto& f : fields) numeric = numeric && parse_number(f, v);
      if (numeric) {
        throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                          ": header row required, found numbers");
      }
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(table.header.size()) + " fields, found " +
                                        std::to_string(fields.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (!parse_number(fields[j], row[j])) {
        throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": field " +
                                          std::to_string(j + 1) + " is not a finite number ('" +
                                          fields[j] + "')");
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw Error(ErrorKind::Parse, "empty input: header row required");
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Parse, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

PairedEstimate harmonize_pairs(std::span<const double> w1, std::span<const double> w2) {
  if (w1.size() != w2.size()) throw Error(ErrorKind::Domain, "instrument columns differ in length");
  if (w1.size() < 3) throw Error(ErrorKind::InsufficientData, "need at least 3 pairs");
  const double s1 = std::sqrt(sample_variance(w1));
  const double s2 = std::sqrt(sample_variance(w2));
  if (!(s1 > 0.0) || !(s2 > 0.0)) {
    throw Error(ErrorKind::EstimationFailure, "an instrument has zero sample variance");
  }
  PairedEstimate out;
  out.rows = w1.size();
  out.sigma = s2 / s1;
  out.mu = mean(w2) - out.sigma * mean(w1);
  double ss = 0.0;
  out.w.resize(out.rows);
  for (std::size_t i = 0; i < out.rows; ++i) {
    const double back = (w2[i] - out.mu) / out.sigma;
    ss += (w1[i] - back) * (w1[i] - back);
    out.w[i] = 0.5 * w1[i] + 0.5 * back;
  }
  out.sigma_u2 = ss / (2.0 * static_cast<double>(out.rows));
  out.error_variance = out.sigma_u2 / 2.0;
  out.signal_variance = sample_variance(out.w) - out.error_variance;
  out.nsr = out.signal_variance > 0.0 ? out.error_variance / out.signal_variance
                                      : std::numeric_limits<double>::infinity();
  return out;
}

PairedEstimate harmonize_pairs(const CsvTable& table) {
  if (table.columns() != 2) {
    throw Error(ErrorKind::Config, "paired mode expects 2 columns (w1,w2), found " +
                                       std::to_string(table.columns()));
  }
  return harmonize_pairs(table.column(0), table.column(1));
}

ReplicateEstimate replicate_average(const CsvTable& table, ReplicateTransform transform) {
  const std::size_t k = table.columns();
  if (k != 2 && k != 4) {
    throw Error(ErrorKind::Config,
                "replicate mode expects 2 columns (p1,p2) or 4 columns (p11,p12,p21,p22), found " +
                    std::to_string(k));
  }
  if (!std::isfinite(transform.shift)) throw Error(ErrorKind::Config, "shift must be finite");
  auto apply = [&](double p, bool& ok) {
    const double x = p - transform.shift;
    if (!transform.log) return x;
    ok = ok && x > 0.0;
    return ok ? std::log(x) : 0.0;
  };

  ReplicateEstimate out;
  out.within_exam = k == 4;
  std::vector<double> w1, w2, d1, d2;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    bool ok = true;
    double a = 0.0, b = 0.0, la = 0.0, lb = 0.0, lc = 0.0, ld = 0.0;
    if (k == 2) {
      a = apply(r[0], ok);
      b = apply(r[1], ok);
    } else {
      la = apply(r[0], ok);
      lb = apply(r[1], ok);
      lc = apply(r[2], ok);
      ld = apply(r[3], ok);
      a = apply(0.5 * (r[0] + r[1]), ok);
      b = apply(0.5 * (r[2] + r[3]), ok);
    }
    if (!ok) {
      out.rejected_rows.push_back(i);
      continue;
    }
    w1.push_back(a);
    w2.push_back(b);
    if (k == 4) {
      d1.push_back(la - lb);
      d2.push_back(lc - ld);
    }
  }
  out.rejected = out.rejected_rows.size();
  out.rows = w1.size();
  if (out.rows < 3) throw Error(ErrorKind::InsufficientData, "need at least 3 accepted rows");

  out.w.resize(out.rows);
  for (std::size_t i = 0; i < out.rows; ++i) out.w[i] = 0.5 * (w1[i] + w2[i]);
  if (k == 2) {
    // Var(W1 - W2) = 2 s^2 with s^2 the per-exam error variance; w carries s^2 / 2.
    std::vector<double> d(out.rows);
    for (std::size_t i = 0; i < out.rows; ++i) d[i] = w1[i] - w2[i];
    out.error_variance = sample_variance(d) / 4.0;
  } else {
    // Single-reading variance m^2 = Var(difference) / 2, pooled over exams;
    // each exam mean carries m^2 / 2 and w carries m^2 / 4.
    const double m2 = 0.5 * (sample_variance(d1) + sample_variance(d2)) / 2.0;
    out.error_variance = m2 / 4.0;
  }
  const double signal = sample_variance(out.w) - out.error_variance;
  if (!(signal > 0.0)) {
    throw Error(ErrorKind::NegativeSignalVariance,
                "estimated signal variance is not positive: Var(w) <= error variance");
  }
  out.sigma_u = std::sqrt(out.error_variance);
  out.sigma_x = std::sqrt(signal);
  out.nsr = out.error_variance / signal;
  return out;
}

}  // namespace gssd
