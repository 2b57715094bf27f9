// SPDX-License-Identifier: Apache-2.0
#include "ipg/master.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <sstream>

namespace ipg {

using nlohmann::json;

std::string status_name(SolveStatus s) {
  switch (s) {
  case SolveStatus::PNE_FOUND:
    return "PNE_FOUND";
  case SolveStatus::NO_PNE:
    return "NO_PNE";
  default:
    return "TIME_LIMIT";
  }
}

namespace {

json rational_json(const Rational &r) {
  if (r.is_integer())
    return json(r.num());
  return json{{"num", r.num()}, {"den", r.den()}, {"value", r.to_double()}};
}

std::string fmt_time(double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", t);
  return buf;
}

std::string fmt_rational_csv(const std::optional<Rational> &r) {
  if (!r)
    return "-";
  if (r->is_integer())
    return std::to_string(r->num());
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", r->to_double());
  return buf;
}

std::string provenance_name(EquilibriumCut::Provenance p) {
  switch (p) {
  case EquilibriumCut::Provenance::general:
    return "general";
  case EquilibriumCut::Provenance::dominance:
    return "dominance";
  case EquilibriumCut::Provenance::payoff:
    return "payoff";
  case EquilibriumCut::Provenance::nogood:
    return "nogood";
  default:
    return "epsilon";
  }
}

} // namespace

std::string report_to_json(const SolveReport &report, const std::string &instance_label) {
  json j;
  j["instance"] = instance_label;
  j["status"] = status_name(report.status);
  j["pnes"] = json::array();
  for (const auto &[profile, w] : report.pnes) {
    json p;
    p["x"] = profile.x;
    p["welfare"] = rational_json(w);
    j["pnes"].push_back(std::move(p));
  }
  j["osw"] = report.osw ? rational_json(*report.osw) : json();
  j["pos"] = report.pos ? rational_json(*report.pos) : json();
  j["poa"] = report.poa ? rational_json(*report.poa) : json();
  j["epsilon"] = report.epsilon ? rational_json(*report.epsilon) : json();
  j["counters"] = {{"ei", report.ei_general},
                   {"ei_p", report.ei_payoff},
                   {"ei_d", report.ei_dominance},
                   {"iterations", report.iterations}};
  j["time_total"] = report.time_total;
  j["time_first"] = report.time_first >= 0 ? json(report.time_first) : json();
  j["bound"] = report.last_bound ? json(*report.last_bound) : json();
  if (!report.cuts.empty()) {
    j["cuts"] = json::array();
    for (const auto &cut : report.cuts)
      j["cuts"].push_back({{"player", cut.player},
                           {"provenance", provenance_name(cut.provenance)},
                           {"deviation", cut.deviation}});
  }
  return j.dump(2);
}

std::string report_csv_header() {
  return "instance,status,pos,ei,ei_p,ei_d,iters,time,time_first,pne_star,osw,bound";
}

std::string report_csv_row(const SolveReport &report, const std::string &instance_label) {
  std::ostringstream os;
  os << instance_label << ',' << status_name(report.status) << ',';
  os << fmt_rational_csv(report.pos) << ',';
  os << report.ei_general << ',' << report.ei_payoff << ',' << report.ei_dominance << ','
     << report.iterations << ',';
  os << fmt_time(report.time_total) << ',';
  os << (report.time_first >= 0 ? fmt_time(report.time_first) : "-") << ',';
  std::optional<Rational> pne_star;
  if (!report.pnes.empty())
    pne_star = report.pnes.front().second;
  os << fmt_rational_csv(pne_star) << ',';
  os << fmt_rational_csv(report.osw) << ',';
  if (report.last_bound)
    os << *report.last_bound;
  else
    os << '-';
  return os.str();
}

} // namespace ipg
