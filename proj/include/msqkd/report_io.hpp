#pragma once

// CSV serialization of key-rate reports and certification records. Numbers
// are written with 12 significant digits and '.' as decimal separator.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "msqkd/keyrate.hpp"
#include "msqkd/oracle.hpp"

namespace msqkd {

std::string format_number(double x);

/// Q,p_a,p_C,p_W,Delta,q0,F_lower,lambda_tilde,term_hp0,term_HpCpW,term_pW,term_pChlam,rate,used_fallback,status
const std::string& keyrate_csv_header();
std::string keyrate_csv_row(const KeyRateReport& r);
/// Abort rows keep Q and leave the numeric fields empty, with status "abort".
std::string keyrate_csv_row(const SweepPoint& pt);
void write_sweep_csv(std::ostream& os, std::span<const SweepPoint> series);
/// Throws std::runtime_error on a malformed file.
std::vector<SweepPoint> read_sweep_csv(std::istream& is);

const std::string& certification_csv_header();
/// Commas in a skip reason are written as ';' to keep the field count fixed.
void write_certification_csv(std::ostream& os, const CertificationReport& report);
/// Throws std::runtime_error on a malformed file.
std::vector<CertificationRecord> read_certification_csv(std::istream& is);

}  // namespace msqkd
