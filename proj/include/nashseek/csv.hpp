#pragma once
// Persisted artifact formats: trace CSV, mean-curve CSV, reference-point
// file. Doubles are written with 17 significant digits so parsing them back
// recovers the exact bits; byte-identical reruns are part of the contract.

#include <cerrno>
#include <cstdio>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nashseek/sdl.hpp"

namespace nashseek {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

// strtod, not stod: stod throws out_of_range on subnormal results, and
// sq_error columns legitimately reach the subnormal range near convergence.
inline double parse_double(const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin)
    throw std::runtime_error("parse_double: not a number: '" + s + "'");
  if (end != begin + s.size())
    throw std::runtime_error("parse_double: trailing junk in '" + s + "'");
  if (errno == ERANGE && (v == HUGE_VAL || v == -HUGE_VAL))
    throw std::runtime_error("parse_double: out of range: '" + s + "'");
  return v;
}

inline std::uint64_t parse_u64(const std::string& s) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("parse_u64: not an integer: '" + s + "'");
  }
  if (pos != s.size())
    throw std::runtime_error("parse_u64: trailing junk in '" + s + "'");
  return static_cast<std::uint64_t>(v);
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

constexpr const char* kTraceCsvHeader =
    "run_id,seed,iter,sq_error,gamma_n,ell_n,h_n,cum_evals";
constexpr const char* kMeanCurveCsvHeader =
    "iter,mean_sq_error,band_lo,band_hi,n_seeds";

struct TraceRow {
  std::string run_id;
  std::uint64_t seed = 0;
  std::uint64_t iter = 0;
  double sq_error = 0.0;
  double gamma_n = 0.0;
  std::uint64_t ell_n = 0;
  double h_n = 0.0;
  std::uint64_t cum_evals = 0;
};

// Iterations going to disk: 1, every stride-th, and the last one.
inline std::vector<std::uint64_t> csv_grid(std::uint64_t iterations,
                                           std::uint64_t stride) {
  if (stride < 1) stride = 1;
  std::vector<std::uint64_t> grid;
  for (std::uint64_t n = 1; n <= iterations; ++n)
    if (n == 1 || n == iterations || n % stride == 0) grid.push_back(n);
  return grid;
}

inline void write_trace_csv(std::ostream& os, const std::string& run_id,
                            const RunTrace& trace,
                            const std::vector<std::uint64_t>& grid) {
  os << kTraceCsvHeader << '\n';
  for (std::uint64_t n : grid) {
    if (n < 1 || n > trace.iterations)
      throw std::invalid_argument("write_trace_csv: grid outside trace");
    const std::size_t k = n - 1;
    os << run_id << ',' << trace.seed << ',' << n << ','
       << (k < trace.sq_error.size() ? format_double(trace.sq_error[k]) : "nan")
       << ',' << format_double(trace.gamma_log[k]) << ',' << trace.ell_log[k]
       << ',' << format_double(trace.h_log[k]) << ',' << trace.cum_evals[k]
       << '\n';
  }
}

inline std::vector<TraceRow> read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("read_trace_csv: empty file");
  if (line != kTraceCsvHeader)
    throw std::runtime_error("read_trace_csv: unexpected header: " + line);
  std::vector<TraceRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto f = split(line, ',');
    if (f.size() != 8)
      throw std::runtime_error("read_trace_csv: bad row: " + line);
    TraceRow r;
    r.run_id = f[0];
    r.seed = parse_u64(f[1]);
    r.iter = parse_u64(f[2]);
    r.sq_error = parse_double(f[3]);
    r.gamma_n = parse_double(f[4]);
    r.ell_n = parse_u64(f[5]);
    r.h_n = parse_double(f[6]);
    r.cum_evals = parse_u64(f[7]);
    rows.push_back(std::move(r));
  }
  return rows;
}

struct MeanCurvePoint {
  std::uint64_t iter = 0;
  double mean_sq_error = 0.0;
  double band_lo = 0.0;
  double band_hi = 0.0;
  std::uint64_t n_seeds = 0;
};

inline void write_mean_curve_csv(std::ostream& os,
                                 const std::vector<MeanCurvePoint>& curve) {
  os << kMeanCurveCsvHeader << '\n';
  for (const auto& pt : curve)
    os << pt.iter << ',' << format_double(pt.mean_sq_error) << ','
       << format_double(pt.band_lo) << ',' << format_double(pt.band_hi) << ','
       << pt.n_seeds << '\n';
}

inline std::vector<MeanCurvePoint> read_mean_curve_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("read_mean_curve_csv: empty file");
  if (line != kMeanCurveCsvHeader)
    throw std::runtime_error("read_mean_curve_csv: unexpected header: " + line);
  std::vector<MeanCurvePoint> curve;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto f = split(line, ',');
    if (f.size() != 5)
      throw std::runtime_error("read_mean_curve_csv: bad row: " + line);
    MeanCurvePoint pt;
    pt.iter = parse_u64(f[0]);
    pt.mean_sq_error = parse_double(f[1]);
    pt.band_lo = parse_double(f[2]);
    pt.band_hi = parse_double(f[3]);
    pt.n_seeds = parse_u64(f[4]);
    curve.push_back(pt);
  }
  return curve;
}

// Reference-point file: "dim=d", then d value lines, then
// "vi_residual=<value>".
inline void write_reference_file(std::ostream& os,
                                 const std::vector<double>& x_star,
                                 double residual) {
  os << "dim=" << x_star.size() << '\n';
  for (double v : x_star) os << format_double(v) << '\n';
  os << "vi_residual=" << format_double(residual) << '\n';
}

struct ReferenceFile {
  std::vector<double> x_star;
  double vi_residual = 0.0;
};

inline ReferenceFile read_reference_file(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("dim=", 0) != 0)
    throw std::runtime_error("read_reference_file: missing dim line");
  const std::size_t dim = static_cast<std::size_t>(parse_u64(line.substr(4)));
  ReferenceFile ref;
  ref.x_star.reserve(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    if (!std::getline(is, line))
      throw std::runtime_error("read_reference_file: truncated values");
    ref.x_star.push_back(parse_double(line));
  }
  if (!std::getline(is, line) || line.rfind("vi_residual=", 0) != 0)
    throw std::runtime_error("read_reference_file: missing vi_residual line");
  ref.vi_residual = parse_double(line.substr(12));
  return ref;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << text;
  if (!os) throw std::runtime_error("write failed for " + path);
}

}  // namespace nashseek
