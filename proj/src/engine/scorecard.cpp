// Copyright 2026 The Metriq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "metriq/engine/scorecard.hpp"

#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "metriq/error.hpp"
#include "metriq/hash.hpp"

namespace metriq {

using plan::Estimator;
using plan::Role;
using plan::RootKey;

bool KeyLess::operator()(const std::vector<Value>& a, const std::vector<Value>& b) const {
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i)
    if (int c = compare(a[i], b[i]); c != 0) return c < 0;
  return a.size() < b.size();
}

std::string slice_label(const std::vector<std::pair<std::string, Value>>& segments) {
  if (segments.empty()) return plan::kOverallId;
  std::string s;
  for (const auto& [name, v] : segments) s += (s.empty() ? "" : ", ") + name + "=" + to_display(v);
  return s;
}

namespace {

Value lookup(const RootValues& values, const RootKey& key, const std::vector<Value>& group) {
  auto it = values.find(key);
  if (it == values.end()) return Value::null();
  auto g = it->second.find(group);
  return g == it->second.end() ? Value::null() : g->second;
}

double num(const Value& v) { return v.is_number() ? v.as_number() : 0.0; }

struct VariantStats {
  Value value;
  Value n;
  std::optional<stats::Sample> sample;
};

VariantStats variant_stats(const RootValues& values, const std::string& metric, const std::string& slice,
                           Estimator est, const std::vector<Value>& group, std::string& note) {
  VariantStats vs;
  auto get = [&](Role r) { return lookup(values, {metric, slice, r}, group); };
  vs.value = get(Role::Value);
  if (est == Estimator::Unsupported) return vs;
  vs.n = get(Role::N);
  if (!vs.value.is_number() || !vs.n.is_number()) return vs;
  double n = vs.n.as_number();
  if (n < 2) {
    note = "insufficient sample";
    return vs;
  }
  try {
    stats::Estimate e;
    if (est == Estimator::Standard) {
      e = stats::mean_and_variance({n, num(get(Role::SumV)), num(get(Role::SumV2))});
    } else {
      e = stats::delta_ratio_variance({n, num(get(Role::SumY)), num(get(Role::SumX)), num(get(Role::SumY2)),
                                       num(get(Role::SumX2)), num(get(Role::SumXY))});
    }
    vs.sample = stats::Sample{vs.value.as_number(), e.variance, n};
  } catch (const Error& err) {
    if (err.code() == ErrorCode::UndefinedRatio)
      note = "undefined ratio";
    else if (err.code() == ErrorCode::InsufficientSample)
      note = "insufficient sample";
    else
      throw;
  }
  return vs;
}

}  // namespace

Scorecard assemble_scorecard(const plan::MetricsPlan& p, const RootValues& values, const AssemblyOptions& opts) {
  Scorecard sc;
  sc.mode = p.experiment() ? Mode::Experiment : Mode::Business;
  if (p.assignment) {
    sc.treatment = p.assignment->treatment;
    sc.control = p.assignment->control;
  }
  sc.config_digest = hex_digest(p.config_digest);
  sc.plan_digest = hex_digest(p.digest());

  std::set<std::string> metrics;
  for (const auto& [key, id] : p.roots) metrics.insert(key.metric);
  std::size_t variant_keys = p.experiment() ? 1 : 0;

  // Observed segment tuples per slice set, across all roots and variants.
  std::map<std::string, std::set<std::vector<Value>, KeyLess>> tuples;
  for (const auto& set : p.slice_sets) {
    auto& t = tuples[set.id];
    if (set.segments.empty()) t.insert(std::vector<Value>{});
    for (const auto& [key, groups] : values) {
      if (key.slice != set.id) continue;
      for (const auto& [group, v] : groups) {
        if (group.size() != variant_keys + set.segments.size())
          throw Error(ErrorCode::Internal, "group key arity does not match slice set '" + set.id + "'");
        t.insert(std::vector<Value>(group.begin() + static_cast<std::ptrdiff_t>(variant_keys), group.end()));
      }
    }
    if (!set.segments.empty() && t.size() > opts.max_segment_cardinality)
      throw Error(ErrorCode::SegmentCardinality, "slice set '" + set.id + "' has " + std::to_string(t.size()) +
                                                     " distinct values, more than the limit of " +
                                                     std::to_string(opts.max_segment_cardinality));
  }

  for (const auto& metric : metrics) {
    std::optional<Estimator> est;
    if (auto it = p.estimators.find(metric); it != p.estimators.end()) est = it->second;
    for (const auto& set : p.slice_sets) {
      for (const auto& tuple : tuples[set.id]) {
        ScorecardRow row;
        row.metric = metric;
        for (std::size_t i = 0; i < set.segments.size(); ++i) row.segments.emplace_back(set.segments[i], tuple[i]);
        row.slice = slice_label(row.segments);
        if (!p.experiment()) {
          row.value = lookup(values, {metric, set.id, Role::Value}, tuple);
          sc.rows.push_back(std::move(row));
          continue;
        }
        Estimator e = est.value_or(Estimator::Unsupported);
        row.estimator = e;
        auto group = [&](const std::string& label) {
          std::vector<Value> g{Value::string(label)};
          g.insert(g.end(), tuple.begin(), tuple.end());
          return g;
        };
        std::string note_t, note_c;
        VariantStats t = variant_stats(values, metric, set.id, e, group(p.assignment->treatment), note_t);
        VariantStats c = variant_stats(values, metric, set.id, e, group(p.assignment->control), note_c);
        row.value_t = t.value;
        row.value_c = c.value;
        row.n_t = t.n;
        row.n_c = c.n;
        if (e == Estimator::Unsupported) {
          row.note = "n/a: no variance estimator";
        } else if (!note_t.empty() || !note_c.empty()) {
          row.note = !note_t.empty() ? note_t : note_c;
        } else if (!t.sample || !c.sample) {
          row.note = "insufficient sample";
        } else {
          try {
            row.test = stats::two_sample_test(*t.sample, *c.sample);
          } catch (const Error& err) {
            if (err.code() != ErrorCode::DegenerateVariance) throw;
            row.note = "degenerate variance";
          }
        }
        sc.rows.push_back(std::move(row));
      }
    }
  }
  return sc;
}

namespace {

nlohmann::json value_json(const Value& v) {
  switch (v.type()) {
    case ValueType::Null: return nullptr;
    case ValueType::Bool: return v.as_bool();
    case ValueType::Number: return std::isfinite(v.as_number()) ? nlohmann::json(v.as_number()) : nlohmann::json(nullptr);
    case ValueType::String: return v.as_string();
  }
  return nullptr;
}

nlohmann::json opt_json(const std::optional<double>& d) { return d ? value_json(Value::number(*d)) : nullptr; }

std::string csv_cell(const Value& v) {
  if (v.is_null()) return {};
  std::string s = to_display(v);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string csv_num(std::optional<double> d) { return d ? format_number(*d) : std::string(); }

}  // namespace

nlohmann::json scorecard_to_json(const Scorecard& sc) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : sc.rows) {
    nlohmann::json seg = nlohmann::json::object();
    for (const auto& [name, v] : r.segments) seg[name] = value_json(v);
    nlohmann::json j = {{"metric", r.metric}, {"slice", r.slice}, {"segments", seg}};
    if (sc.mode == Mode::Business) {
      j["value"] = value_json(r.value);
    } else {
      j["estimator"] = std::string(plan::to_string(r.estimator.value_or(Estimator::Unsupported)));
      j["treatment"] = {{"value", value_json(r.value_t)}, {"n", value_json(r.n_t)}};
      j["control"] = {{"value", value_json(r.value_c)}, {"n", value_json(r.n_c)}};
      if (r.test) {
        const auto& t = *r.test;
        j["test"] = {{"delta", t.delta},         {"relative_delta", opt_json(t.relative_delta)},
                     {"stderr", t.stderr_},      {"z", t.z},
                     {"p_value", t.p_value},     {"ci_low", t.ci_low},
                     {"ci_high", t.ci_high}};
      } else {
        j["test"] = nullptr;
      }
      j["note"] = r.note;
    }
    rows.push_back(std::move(j));
  }
  nlohmann::json meta = {{"config_digest", sc.config_digest}, {"plan_digest", sc.plan_digest}};
  if (sc.mode == Mode::Experiment) {
    meta["treatment"] = sc.treatment;
    meta["control"] = sc.control;
  }
  return {{"mode", sc.mode == Mode::Experiment ? "experiment" : "business"}, {"metadata", meta}, {"rows", rows}};
}

std::string scorecard_to_csv(const Scorecard& sc) {
  std::ostringstream out;
  if (sc.mode == Mode::Business) {
    out << "metric,slice,value\n";
    for (const auto& r : sc.rows)
      out << csv_cell(Value::string(r.metric)) << ',' << csv_cell(Value::string(r.slice)) << ',' << csv_cell(r.value)
          << '\n';
    return out.str();
  }
  out << "metric,slice,estimator,value_t,value_c,n_t,n_c,delta,relative_delta,stderr,z,p_value,ci_low,ci_high,note\n";
  for (const auto& r : sc.rows) {
    out << csv_cell(Value::string(r.metric)) << ',' << csv_cell(Value::string(r.slice)) << ','
        << plan::to_string(r.estimator.value_or(Estimator::Unsupported)) << ',' << csv_cell(r.value_t) << ','
        << csv_cell(r.value_c) << ',' << csv_cell(r.n_t) << ',' << csv_cell(r.n_c) << ',';
    if (r.test) {
      const auto& t = *r.test;
      out << csv_num(t.delta) << ',' << csv_num(t.relative_delta) << ',' << csv_num(t.stderr_) << ','
          << csv_num(t.z) << ',' << csv_num(t.p_value) << ',' << csv_num(t.ci_low) << ',' << csv_num(t.ci_high);
    } else {
      out << ",,,,,,";
    }
    out << ',' << csv_cell(Value::string(r.note)) << '\n';
  }
  return out.str();
}

std::string scorecard_summary(const Scorecard& sc) {
  std::ostringstream out;
  auto fmt = [](const std::optional<double>& d) {
    if (!d) return std::string("-");
    std::ostringstream s;
    s << std::setprecision(6) << *d;
    return s.str();
  };
  auto as_opt = [](const Value& v) { return v.is_number() ? std::optional(v.as_number()) : std::nullopt; };
  if (sc.mode == Mode::Business) {
    out << std::left << std::setw(28) << "metric" << std::setw(32) << "slice" << "value\n";
    for (const auto& r : sc.rows)
      out << std::setw(28) << r.metric << std::setw(32) << r.slice << fmt(as_opt(r.value)) << '\n';
    return out.str();
  }
  out << std::left << std::setw(28) << "metric" << std::setw(32) << "slice" << std::setw(14) << "delta"
      << std::setw(14) << "p" << "note\n";
  for (const auto& r : sc.rows) {
    std::optional<double> delta, p;
    if (r.test) {
      delta = r.test->delta;
      p = r.test->p_value;
    } else if (r.value_t.is_number() && r.value_c.is_number()) {
      delta = r.value_t.as_number() - r.value_c.as_number();
    }
    out << std::setw(28) << r.metric << std::setw(32) << r.slice << std::setw(14) << fmt(delta) << std::setw(14)
        << fmt(p) << r.note << '\n';
  }
  return out.str();
}

namespace {

bool close(double a, double b, double rel, double abs) {
  if (a == b) return true;
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  return std::fabs(a - b) <= rel * std::max(std::fabs(a), std::fabs(b)) + abs;
}

void cmp(std::vector<std::string>& out, const std::string& where, const std::string& what, const Value& a,
         const Value& b, double rel, double abs) {
  bool ok = a.is_number() && b.is_number() ? close(a.as_number(), b.as_number(), rel, abs) : a == b;
  if (!ok) out.push_back(where + " " + what + ": " + to_display(a) + " vs " + to_display(b));
}

Value opt_value(const std::optional<double>& d) { return d ? Value::number(*d) : Value::null(); }

}  // namespace

std::vector<std::string> compare_scorecards(const Scorecard& a, const Scorecard& b, double rel, double abs) {
  std::vector<std::string> out;
  if (a.mode != b.mode) out.push_back("modes differ");
  if (a.rows.size() != b.rows.size()) {
    out.push_back("row counts differ: " + std::to_string(a.rows.size()) + " vs " + std::to_string(b.rows.size()));
    return out;
  }
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& x = a.rows[i];
    const auto& y = b.rows[i];
    std::string where = "row " + std::to_string(i) + " (" + x.metric + ", " + x.slice + ")";
    if (x.metric != y.metric || x.slice != y.slice) {
      out.push_back(where + " vs (" + y.metric + ", " + y.slice + "): rows are not aligned");
      continue;
    }
    cmp(out, where, "value", x.value, y.value, rel, abs);
    cmp(out, where, "value_t", x.value_t, y.value_t, rel, abs);
    cmp(out, where, "value_c", x.value_c, y.value_c, rel, abs);
    cmp(out, where, "n_t", x.n_t, y.n_t, rel, abs);
    cmp(out, where, "n_c", x.n_c, y.n_c, rel, abs);
    if (x.estimator != y.estimator) out.push_back(where + " estimator differs");
    if (x.note != y.note) out.push_back(where + " note: '" + x.note + "' vs '" + y.note + "'");
    if (x.test.has_value() != y.test.has_value()) {
      out.push_back(where + " test present in only one scorecard");
      continue;
    }
    if (!x.test) continue;
    const auto& s = *x.test;
    const auto& t = *y.test;
    cmp(out, where, "delta", Value::number(s.delta), Value::number(t.delta), rel, abs);
    cmp(out, where, "relative_delta", opt_value(s.relative_delta), opt_value(t.relative_delta), rel, abs);
    cmp(out, where, "stderr", Value::number(s.stderr_), Value::number(t.stderr_), rel, abs);
    cmp(out, where, "z", Value::number(s.z), Value::number(t.z), rel, abs);
    cmp(out, where, "p_value", Value::number(s.p_value), Value::number(t.p_value), rel, abs);
    cmp(out, where, "ci_low", Value::number(s.ci_low), Value::number(t.ci_low), rel, abs);
    cmp(out, where, "ci_high", Value::number(s.ci_high), Value::number(t.ci_high), rel, abs);
  }
  return out;
}

}  // namespace metriq
