#include "tropical/report.hpp"

#include <json.hpp>

namespace tropical {

namespace {

nlohmann::json rationals(const RationalVector& v) {
  auto arr = nlohmann::json::array();
  for (const auto& r : v) arr.push_back(to_string(r));
  return arr;
}

}  // namespace

std::string equilibration_report(const OdeSystem& sys, const std::vector<ExponentSolution>& solutions) {
  using nlohmann::json;
  json doc;
  doc["variables"] = sys.variables();
  json list = json::array();
  for (const auto& s : solutions) {
    json js;
    js["a"] = rationals(s.a.values);
    json branch = json::array();
    for (const auto& p : s.branch.pairs) {
      if (p) branch.push_back({p->first, p->second});
      else branch.push_back(nullptr);
    }
    js["branch"] = std::move(branch);
    js["mu"] = rationals(s.mu);
    js["truncated_terms"] = s.truncated_terms;
    json family = json::array();
    for (const auto& d : s.family) family.push_back(rationals(d));
    js["family"] = std::move(family);
    js["pinned"] = s.pinned();
    list.push_back(std::move(js));
  }
  doc["solutions"] = std::move(list);
  return doc.dump(2) + "\n";
}

}  // namespace tropical
