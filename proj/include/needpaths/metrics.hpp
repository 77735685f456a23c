// Multi-label evaluation: micro-averaged precision/recall/F1 over pooled
// (instance, label) counts, plus per-class precision/recall/F1 with support.
// Zero denominators yield 0 by convention, stated in the report output.
#pragma once

#include <algorithm>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "needpaths/common.hpp"
#include "needpaths/linking.hpp"

namespace needpaths {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // gold positives for this label
  std::size_t tp = 0, fp = 0, fn = 0;
};

struct MetricsReport {
  double micro_precision = 0.0;
  double micro_recall = 0.0;
  double micro_f1 = 0.0;
  std::size_t tp = 0, fp = 0, fn = 0;
  std::map<std::string, ClassMetrics> per_class;

  nlohmann::json to_json() const {
    nlohmann::json classes;
    for (const auto& [label, m] : per_class) {
      classes[label] = {{"precision", m.precision}, {"recall", m.recall},   {"f1", m.f1},
                        {"support", m.support},     {"tp", m.tp},           {"fp", m.fp},
                        {"fn", m.fn}};
    }
    return {{"micro_precision", micro_precision},
            {"micro_recall", micro_recall},
            {"micro_f1", micro_f1},
            {"tp", tp},
            {"fp", fp},
            {"fn", fn},
            {"per_class", classes},
            {"conventions", "zero denominators yield 0"}};
  }

  // Aligned plain-text table.
  std::string to_table() const {
    std::ostringstream out;
    out << std::fixed << std::setprecision(4);
    std::size_t width = 5;
    for (const auto& [label, m] : per_class) width = std::max(width, label.size());
    out << std::left << std::setw(static_cast<int>(width)) << "label"
        << "  precision  recall  f1      support\n";
    for (const auto& [label, m] : per_class) {
      out << std::left << std::setw(static_cast<int>(width)) << label << "  "
          << std::setw(9) << m.precision << "  " << std::setw(6) << m.recall << "  "
          << std::setw(6) << m.f1 << "  " << m.support << "\n";
    }
    out << std::left << std::setw(static_cast<int>(width)) << "micro" << "  " << std::setw(9)
        << micro_precision << "  " << std::setw(6) << micro_recall << "  " << std::setw(6)
        << micro_f1 << "  " << (tp + fn) << "\n";
    out << "(zero denominators yield 0)\n";
    return out.str();
  }
};

namespace detail {

inline double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

inline double f1_of(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

}  // namespace detail

// Label sets per instance, aligned by instance_id.
struct LabeledSets {
  std::string instance_id;
  std::set<std::string> labels;
};

// Pooled micro scores plus per-class breakdown. Predictions and golds must
// cover the same instance ids.
inline MetricsReport micro_prf(const std::vector<LabeledSets>& predictions,
                               const std::vector<LabeledSets>& golds,
                               const LabelSet& label_set) {
  if (predictions.size() != golds.size()) {
    throw data_error("predictions and golds differ in instance count: " +
                     std::to_string(predictions.size()) + " vs " + std::to_string(golds.size()));
  }
  std::map<std::string, const std::set<std::string>*> gold_by_id;
  for (const auto& g : golds) {
    if (!gold_by_id.emplace(g.instance_id, &g.labels).second) {
      throw data_error("duplicate gold instance id: " + g.instance_id);
    }
  }
  MetricsReport report;
  for (const auto& label : label_set.labels) report.per_class[label] = {};

  std::set<std::string> seen;
  for (const auto& pred : predictions) {
    auto it = gold_by_id.find(pred.instance_id);
    if (it == gold_by_id.end()) {
      throw data_error("prediction for unknown instance id: " + pred.instance_id);
    }
    if (!seen.insert(pred.instance_id).second) {
      throw data_error("duplicate prediction instance id: " + pred.instance_id);
    }
    const auto& gold = *it->second;
    for (const auto& label : pred.labels) {
      if (!label_set.contains(label)) {
        throw data_error("predicted label not in the active label set: " + label);
      }
      auto& cls = report.per_class[label];
      if (gold.count(label) > 0) {
        ++report.tp;
        ++cls.tp;
      } else {
        ++report.fp;
        ++cls.fp;
      }
    }
    for (const auto& label : gold) {
      if (!label_set.contains(label)) {
        throw data_error("gold label not in the active label set: " + label);
      }
      if (pred.labels.count(label) == 0) {
        ++report.fn;
        ++report.per_class[label].fn;
      }
    }
  }

  report.micro_precision =
      detail::safe_div(static_cast<double>(report.tp), static_cast<double>(report.tp + report.fp));
  report.micro_recall =
      detail::safe_div(static_cast<double>(report.tp), static_cast<double>(report.tp + report.fn));
  report.micro_f1 = detail::f1_of(report.micro_precision, report.micro_recall);
  for (auto& [label, m] : report.per_class) {
    m.support = m.tp + m.fn;
    m.precision = detail::safe_div(static_cast<double>(m.tp), static_cast<double>(m.tp + m.fp));
    m.recall = detail::safe_div(static_cast<double>(m.tp), static_cast<double>(m.tp + m.fn));
    m.f1 = detail::f1_of(m.precision, m.recall);
  }
  return report;
}

// Per-label F1 map, consistent with micro_prf's per-class breakdown.
inline std::map<std::string, double> per_class_f1(const std::vector<LabeledSets>& predictions,
                                                  const std::vector<LabeledSets>& golds,
                                                  const LabelSet& label_set) {
  MetricsReport report = micro_prf(predictions, golds, label_set);
  std::map<std::string, double> out;
  for (const auto& [label, m] : report.per_class) out[label] = m.f1;
  return out;
}

}  // namespace needpaths
