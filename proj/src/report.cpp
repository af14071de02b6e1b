#include "lops/report.hpp"

#include <cmath>
#include <cstdio>

namespace lops {

bool Report::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

CheckItem& Report::add(std::string name, std::string anchor, bool ok, Json detail) {
  checks.push_back({std::move(name), std::move(anchor), ok, std::move(detail)});
  return checks.back();
}

const CheckItem* Report::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

Json Report::to_json() const {
  Json j;
  j["report"] = title;
  j["pass"] = pass();
  j["summary"] = summary;
  Json items = Json::array();
  for (const auto& c : checks) {
    Json item;
    item["check"] = c.name;
    item["anchor"] = c.anchor;
    item["pass"] = c.pass;
    item["detail"] = c.detail;
    items.push_back(std::move(item));
  }
  j["checks"] = std::move(items);
  return j;
}

std::string Report::to_text() const {
  std::string out;
  for (const auto& c : checks) out += (c.pass ? "PASS " : "FAIL ") + c.name + (c.anchor.empty() ? "" : "  [" + c.anchor + "]") + "\n";
  out += pass() ? "all checks passed\n" : "some checks FAILED\n";
  return out;
}

std::string num_str(double x, int digits) {
  if (std::abs(x) < 1e-300) x = 0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits, x);
  return buf;
}

}  // namespace lops
