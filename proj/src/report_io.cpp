#include "msqkd/report_io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace msqkd {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::logic_error&) {
    used = 0;
  }
  if (s.empty() || used != s.size()) throw std::runtime_error("csv: bad number '" + s + "'");
  return v;
}

}  // namespace

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);  // no "-0"
  return buf;
}

const std::string& keyrate_csv_header() {
  static const std::string h =
      "Q,p_a,p_C,p_W,Delta,q0,F_lower,lambda_tilde,term_hp0,term_HpCpW,term_pW,term_pChlam,rate,used_fallback,status";
  return h;
}

std::string keyrate_csv_row(const KeyRateReport& r) {
  std::string row;
  for (double v : {r.Q, r.p_a, r.p_C, r.p_W, r.Delta, r.q0, r.F_lower, r.lambda_tilde, r.term_hp0, r.term_HpCpW,
                   r.term_pW, r.term_pChlam, r.rate}) {
    row += format_number(v);
    row += ',';
  }
  row += r.used_fallback ? "1" : "0";
  row += ",ok";
  return row;
}

std::string keyrate_csv_row(const SweepPoint& pt) {
  if (pt.report) return keyrate_csv_row(*pt.report);
  return format_number(pt.Q) + ",,,,,,,,,,,,,,abort";
}

void write_sweep_csv(std::ostream& os, std::span<const SweepPoint> series) {
  os << keyrate_csv_header() << '\n';
  for (const auto& pt : series) os << keyrate_csv_row(pt) << '\n';
}

std::vector<SweepPoint> read_sweep_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != keyrate_csv_header()) throw std::runtime_error("csv: unexpected header");
  std::vector<SweepPoint> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 15) throw std::runtime_error("csv: expected 15 fields in '" + line + "'");
    SweepPoint pt;
    pt.Q = parse_number(f[0]);
    if (f[14] == "abort") {
      pt.abort_reason = "abort";
    } else if (f[14] == "ok") {
      KeyRateReport r;
      double* dst[] = {&r.Q,    &r.p_a,      &r.p_C,         &r.p_W,      &r.Delta,   &r.q0,          &r.F_lower,
                       &r.lambda_tilde, &r.term_hp0, &r.term_HpCpW, &r.term_pW, &r.term_pChlam, &r.rate};
      for (std::size_t k = 0; k < 13; ++k) *dst[k] = parse_number(f[k]);
      if (f[13] != "0" && f[13] != "1") throw std::runtime_error("csv: bad used_fallback flag");
      r.used_fallback = f[13] == "1";
      r.rate_long_form = r.rate;
      r.rate_per_qubit = r.rate * r.p_a;
      pt.report = r;
    } else {
      throw std::runtime_error("csv: bad status '" + f[14] + "'");
    }
    out.push_back(std::move(pt));
  }
  return out;
}

const std::string& certification_csv_header() {
  static const std::string h = "id,rate_exact,rate_bound,rate_bound_symmetric,slack,checks_passed,skipped,reason";
  return h;
}

void write_certification_csv(std::ostream& os, const CertificationReport& report) {
  os << certification_csv_header() << '\n';
  for (const auto& r : report.records) {
    os << r.id << ',';
    if (r.skipped) {
      std::string reason = r.reason;
      for (char& c : reason) {
        if (c == ',' || c == '\n') c = ';';
      }
      os << ",,,,0,1," << reason << '\n';
      continue;
    }
    os << format_number(r.rate_exact) << ',' << format_number(r.rate_bound) << ',';
    if (r.rate_bound_symmetric) os << format_number(*r.rate_bound_symmetric);
    os << ',' << format_number(r.slack) << ',' << (r.checks_passed ? 1 : 0) << ",0,\n";
  }
}

std::vector<CertificationRecord> read_certification_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != certification_csv_header()) throw std::runtime_error("csv: unexpected header");
  std::vector<CertificationRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 8) throw std::runtime_error("csv: expected 8 fields in '" + line + "'");
    CertificationRecord r;
    r.id = f[0];
    if (f[6] != "0" && f[6] != "1") throw std::runtime_error("csv: bad skipped flag");
    r.skipped = f[6] == "1";
    r.reason = f[7];
    if (!r.skipped) {
      r.rate_exact = parse_number(f[1]);
      r.rate_bound = parse_number(f[2]);
      if (!f[3].empty()) r.rate_bound_symmetric = parse_number(f[3]);
      r.slack = parse_number(f[4]);
      if (f[5] != "0" && f[5] != "1") throw std::runtime_error("csv: bad checks_passed flag");
      r.checks_passed = f[5] == "1";
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace msqkd
