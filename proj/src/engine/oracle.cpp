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

#include "metriq/engine/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "metriq/error.hpp"
#include "metriq/frontend/parser.hpp"

namespace metriq {

namespace {

using mdl::Expr;

constexpr double kNoise = 1e-11;  // relative rounding-noise floor

struct Less {
  bool operator()(const std::vector<Value>& a, const std::vector<Value>& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                        [](const Value& x, const Value& y) { return compare(x, y) < 0; });
  }
};

Value num(double d) { return std::isnan(d) ? Value::null() : Value::number(d); }

class Evaluator {
 public:
  Evaluator(const Dataset& ds, std::map<std::string, std::string> units) : ds_(ds), units_(std::move(units)) {}

  Value row(const Expr& e, std::size_t r) const {
    if (auto* c = e.as<mdl::ColumnRef>()) return ds_.column(c->name)[r];
    if (auto* l = e.as<mdl::Literal>()) return l->value;
    if (auto* u = e.as<mdl::Unary>()) {
      Value v = row(*u->operand, r);
      if (v.is_null()) return v;
      return u->op == UnaryOp::Neg ? num(-v.as_number()) : Value::boolean(!v.as_bool());
    }
    if (auto* c = e.as<mdl::Conditional>()) {
      Value cond = row(*c->cond, r);
      return (cond.is_bool() && cond.as_bool()) ? row(*c->then_branch, r) : row(*c->else_branch, r);
    }
    if (auto* b = e.as<mdl::Binary>()) return binary(*b, r);
    throw Error(ErrorCode::Internal, "oracle: aggregation in row context");
  }

  Value binary(const mdl::Binary& b, std::size_t r) const {
    auto null_lit = [](const Expr& x) {
      auto* l = x.as<mdl::Literal>();
      return l && l->value.is_null();
    };
    if (b.op == BinaryOp::Eq || b.op == BinaryOp::Ne) {
      const Expr* other = null_lit(*b.rhs) ? b.lhs.get() : null_lit(*b.lhs) ? b.rhs.get() : nullptr;
      if (other) {
        bool isnull = row(*other, r).is_null();
        return Value::boolean(b.op == BinaryOp::Eq ? isnull : !isnull);
      }
    }
    Value x = row(*b.lhs, r);
    Value y = row(*b.rhs, r);
    if (b.op == BinaryOp::And || b.op == BinaryOp::Or) {
      bool dominant = b.op == BinaryOp::Or;  // true dominates `or`, false dominates `and`
      if ((x.is_bool() && x.as_bool() == dominant) || (y.is_bool() && y.as_bool() == dominant))
        return Value::boolean(dominant);
      if (x.is_null() || y.is_null()) return Value::null();
      return Value::boolean(!dominant);
    }
    if (x.is_null() || y.is_null()) return Value::null();
    switch (b.op) {
      case BinaryOp::Add: return num(x.as_number() + y.as_number());
      case BinaryOp::Sub: return num(x.as_number() - y.as_number());
      case BinaryOp::Mul: return num(x.as_number() * y.as_number());
      case BinaryOp::Div: return y.as_number() == 0 ? Value::null() : num(x.as_number() / y.as_number());
      default: break;
    }
    int c;
    if (x.is_number())
      c = x.as_number() < y.as_number() ? -1 : (x.as_number() > y.as_number() ? 1 : 0);
    else if (x.is_string())
      c = x.as_string() < y.as_string() ? -1 : (y.as_string() < x.as_string() ? 1 : 0);
    else
      c = x.as_bool() == y.as_bool() ? 0 : (x.as_bool() ? 1 : -1);
    switch (b.op) {
      case BinaryOp::Eq: return Value::boolean(c == 0);
      case BinaryOp::Ne: return Value::boolean(c != 0);
      case BinaryOp::Lt: return Value::boolean(c < 0);
      case BinaryOp::Le: return Value::boolean(c <= 0);
      case BinaryOp::Gt: return Value::boolean(c > 0);
      case BinaryOp::Ge: return Value::boolean(c >= 0);
      default: break;
    }
    throw Error(ErrorCode::Internal, "oracle: unexpected operator");
  }

  const std::vector<Value>& unit_keys(const std::string& unit) const {
    auto it = units_.find(unit);
    if (it == units_.end()) throw Error(ErrorCode::UnknownUnit, "oracle: unknown unit '" + unit + "'");
    return ds_.column(it->second);
  }

  // Rows grouped by unit key, units in key order.
  std::vector<std::vector<std::size_t>> by_unit(const std::string& unit, const std::vector<std::size_t>& rows) const {
    const auto& keys = unit_keys(unit);
    std::map<std::vector<Value>, std::vector<std::size_t>, Less> groups;
    for (std::size_t r : rows) groups[{keys[r]}].push_back(r);
    std::vector<std::vector<std::size_t>> out;
    for (auto& [k, g] : groups) out.push_back(std::move(g));
    return out;
  }

  Value aggregate(const mdl::Aggregation& a, const std::vector<std::size_t>& rows) const {
    std::vector<Value> values;
    if (a.arg && a.arg->as<mdl::Aggregation>()) {
      const auto& inner = *a.arg->as<mdl::Aggregation>();
      for (const auto& unit_rows : by_unit(*inner.level, rows)) values.push_back(aggregate(inner, unit_rows));
    } else {
      for (std::size_t r : rows) {
        if (a.filter) {
          Value f = row(*a.filter, r);
          if (!(f.is_bool() && f.as_bool())) continue;
        }
        values.push_back(a.arg ? row(*a.arg, r) : Value::boolean(true));
      }
    }
    std::vector<double> xs;
    for (const auto& v : values)
      if (v.is_number()) xs.push_back(v.as_number());
    switch (a.kind) {
      case AggKind::Count: {
        if (!a.arg) return Value::number(static_cast<double>(values.size()));
        std::size_t c = 0;
        for (const auto& v : values) c += v.is_null() ? 0 : 1;
        return Value::number(static_cast<double>(c));
      }
      case AggKind::Sum: {
        long double s = 0;
        for (double x : xs) s += x;
        return num(static_cast<double>(s));
      }
      case AggKind::Avg: {
        if (xs.empty()) return Value::null();
        long double s = 0;
        for (double x : xs) s += x;
        return num(static_cast<double>(s / xs.size()));
      }
      case AggKind::Min:
        return xs.empty() ? Value::null() : Value::number(*std::min_element(xs.begin(), xs.end()));
      case AggKind::Max:
        return xs.empty() ? Value::null() : Value::number(*std::max_element(xs.begin(), xs.end()));
      case AggKind::Percentile: {
        if (xs.empty()) return Value::null();
        std::sort(xs.begin(), xs.end());
        std::size_t k = 1;
        double target = *a.rank * static_cast<double>(xs.size());
        while (100.0 * static_cast<double>(k) < target) ++k;
        return Value::number(xs[k - 1]);
      }
      case AggKind::SumProduct: break;
    }
    throw Error(ErrorCode::Internal, "oracle: unexpected aggregation");
  }

 private:
  const Dataset& ds_;
  std::map<std::string, std::string> units_;
};

enum class Kind { Standard, Delta, None };

Kind classify(const Expr& e, const std::string& unit) {
  auto* a = e.as<mdl::Aggregation>();
  if (!a || a->kind != AggKind::Avg || !a->arg) return Kind::None;
  if (auto* inner = a->arg->as<mdl::Aggregation>()) return inner->level == unit ? Kind::Standard : Kind::None;
  return Kind::Delta;
}

struct Side {
  Value value;
  Value n;
  std::optional<double> variance;
  std::string note;
};

double mean_of(const std::vector<double>& xs) {
  long double s = 0;
  for (double x : xs) s += x;
  return static_cast<double>(s / xs.size());
}

Side side_stats(const Evaluator& ev, const Expr& metric, Kind kind, const std::string& unit,
                const std::vector<std::size_t>& rows) {
  Side s;
  if (rows.empty()) return s;
  const auto& agg = *metric.as<mdl::Aggregation>();
  s.value = ev.aggregate(agg, rows);
  if (kind == Kind::None) return s;
  auto units = ev.by_unit(unit, rows);
  if (kind == Kind::Standard) {
    std::vector<double> v;
    for (const auto& u : units) {
      Value x = ev.aggregate(*agg.arg->as<mdl::Aggregation>(), u);
      if (x.is_number()) v.push_back(x.as_number());
    }
    s.n = Value::number(static_cast<double>(v.size()));
    if (!s.value.is_number()) return s;
    if (v.size() < 2) {
      s.note = "insufficient sample";
      return s;
    }
    double m = mean_of(v);
    long double ss = 0, sq = 0;
    for (double x : v) {
      ss += (x - m) * (x - m);
      sq += x * x;
    }
    double centered = static_cast<double>(ss);
    if (centered <= kNoise * static_cast<double>(sq)) centered = 0;
    double n = static_cast<double>(v.size());
    s.variance = centered / (n - 1) / n;
    return s;
  }
  // ratio of per-unit sums to per-unit counts
  std::vector<double> ys, xs;
  for (const auto& u : units) {
    long double y = 0;
    double x = 0;
    for (std::size_t r : u) {
      if (agg.filter) {
        Value f = ev.row(*agg.filter, r);
        if (!(f.is_bool() && f.as_bool())) continue;
      }
      Value v = ev.row(*agg.arg, r);
      if (v.is_number()) {
        y += v.as_number();
        x += 1;
      }
    }
    ys.push_back(static_cast<double>(y));
    xs.push_back(x);
  }
  s.n = Value::number(static_cast<double>(ys.size()));
  if (!s.value.is_number()) return s;
  if (ys.size() < 2) {
    s.note = "insufficient sample";
    return s;
  }
  double n = static_cast<double>(ys.size());
  double my = mean_of(ys), mx = mean_of(xs);
  if (mx == 0) {
    s.note = "undefined ratio";
    return s;
  }
  long double syy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    syy += (ys[i] - my) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (ys[i] - my) * (xs[i] - mx);
  }
  double vy = static_cast<double>(syy) / (n - 1);
  double vx = static_cast<double>(sxx) / (n - 1);
  double cxy = static_cast<double>(sxy) / (n - 1);
  double a = vy / (mx * mx);
  double b = 2 * my * cxy / (mx * mx * mx);
  double c = my * my * vx / (mx * mx * mx * mx);
  double bracket = a - b + c;
  if (bracket <= 2 * kNoise * (std::fabs(a) + std::fabs(b) + std::fabs(c))) bracket = 0;
  s.variance = bracket / n;
  return s;
}

std::string label(const std::vector<std::string>& names, const std::vector<Value>& values) {
  if (names.empty()) return "(all)";
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? ", " : "") + names[i] + "=" + to_display(values[i]);
  return out;
}

}  // namespace

Scorecard brute_force_oracle(const std::string& metric_source, const Dataset& ds, const AnalysisConfig& cfg) {
  auto parsed = mdl::parse_metric_set(metric_source);
  if (!parsed.ok()) throw Error(ErrorCode::Syntax, "oracle: metric source does not parse");
  const mdl::MetricSet& ms = *parsed.metric_set;

  std::map<std::string, std::string> units = ds.schema.units;
  for (const auto& u : ms.units) units[u.name] = u.key_column;
  Evaluator ev(ds, units);
  bool experiment = cfg.mode == Mode::Experiment;

  // requested metrics, sorted by name
  std::set<std::string> requested;
  if (!cfg.metric_groups && !cfg.metrics) {
    for (const auto& m : ms.metrics) requested.insert(m.name);
  } else {
    for (const auto& g : cfg.metric_groups.value_or(std::vector<std::string>{})) {
      const auto* group = ms.find_group(g);
      if (!group) throw Error(ErrorCode::UnknownGroup, "oracle: unknown group '" + g + "'");
      requested.insert(group->members.begin(), group->members.end());
    }
    for (const auto& m : cfg.metrics.value_or(std::vector<std::string>{})) {
      if (!ms.find_metric(m)) throw Error(ErrorCode::UnknownMetric, "oracle: unknown metric '" + m + "'");
      requested.insert(m);
    }
  }
  if (requested.empty()) throw Error(ErrorCode::EmptyRequest, "oracle: no metrics requested");

  // rows in scope, with their variant labels
  std::vector<std::size_t> rows;
  std::vector<std::string> variant_of(ds.row_count);
  if (experiment) {
    const auto& labels = ds.column(cfg.assignment_column);
    const auto& keys = ev.unit_keys(cfg.randomization_unit);
    std::map<std::vector<Value>, std::string, Less> assigned;
    for (std::size_t r = 0; r < ds.row_count; ++r) {
      if (!labels[r].is_string()) continue;
      const std::string& l = labels[r].as_string();
      if (l != cfg.treatment && l != cfg.control) continue;
      auto [it, fresh] = assigned.emplace(std::vector<Value>{keys[r]}, l);
      if (!fresh && it->second != l)
        throw Error(ErrorCode::ContaminatedAssignment, "oracle: unit in both variants");
      variant_of[r] = l;
      rows.push_back(r);
    }
  } else {
    for (std::size_t r = 0; r < ds.row_count; ++r) rows.push_back(r);
  }

  std::vector<std::vector<std::string>> sets;
  auto add = [&](const std::vector<std::string>& s) {
    if (std::find(sets.begin(), sets.end(), s) == sets.end()) sets.push_back(s);
  };
  if (cfg.segments.include_overall) sets.push_back({});
  for (const auto& s : cfg.segments.segments) add({s});
  for (const auto& t : cfg.segments.combine) add(t);

  Scorecard sc;
  sc.mode = cfg.mode;
  if (experiment) {
    sc.treatment = cfg.treatment;
    sc.control = cfg.control;
  }

  // slice tuple -> rows, per slice set
  std::vector<std::map<std::vector<Value>, std::vector<std::size_t>, Less>> slices(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (sets[i].empty()) slices[i][{}];
    for (std::size_t r : rows) {
      std::vector<Value> key;
      for (const auto& name : sets[i]) {
        const auto* seg = ms.find_segment(name);
        if (!seg) throw Error(ErrorCode::Config, "oracle: unknown segment '" + name + "'");
        key.push_back(ev.row(*seg->expr, r));
      }
      slices[i][key].push_back(r);
    }
    if (!sets[i].empty() && slices[i].size() > cfg.max_segment_cardinality)
      throw Error(ErrorCode::SegmentCardinality, "oracle: too many segment values");
  }

  for (const auto& name : requested) {
    const Expr& metric = *ms.find_metric(name)->expr;
    Kind kind = experiment ? classify(metric, cfg.randomization_unit) : Kind::None;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      for (const auto& [key, slice_rows] : slices[i]) {
        ScorecardRow row;
        row.metric = name;
        for (std::size_t k = 0; k < sets[i].size(); ++k) row.segments.emplace_back(sets[i][k], key[k]);
        row.slice = label(sets[i], key);
        if (!experiment) {
          row.value = ev.aggregate(*metric.as<mdl::Aggregation>(), slice_rows);
          sc.rows.push_back(std::move(row));
          continue;
        }
        row.estimator = kind == Kind::Standard ? plan::Estimator::Standard
                        : kind == Kind::Delta  ? plan::Estimator::DeltaRatio
                                               : plan::Estimator::Unsupported;
        std::vector<std::size_t> t_rows, c_rows;
        for (std::size_t r : slice_rows) (variant_of[r] == cfg.treatment ? t_rows : c_rows).push_back(r);
        Side t = side_stats(ev, metric, kind, cfg.randomization_unit, t_rows);
        Side c = side_stats(ev, metric, kind, cfg.randomization_unit, c_rows);
        row.value_t = t.value;
        row.value_c = c.value;
        row.n_t = t.n;
        row.n_c = c.n;
        if (kind == Kind::None) {
          row.note = "n/a: no variance estimator";
        } else if (!t.note.empty() || !c.note.empty()) {
          row.note = !t.note.empty() ? t.note : c.note;
        } else if (!t.variance || !c.variance) {
          row.note = "insufficient sample";
        } else {
          double delta = t.value.as_number() - c.value.as_number();
          double var = *t.variance + *c.variance;
          double noise = kNoise * std::max(std::fabs(t.value.as_number()), std::fabs(c.value.as_number()));
          if (var == 0 && std::fabs(delta) > noise) {
            row.note = "degenerate variance";
          } else {
            stats::TestResult tr;
            tr.value_t = t.value.as_number();
            tr.value_c = c.value.as_number();
            tr.n_t = t.n.as_number();
            tr.n_c = c.n.as_number();
            tr.delta = delta;
            tr.stderr_ = std::sqrt(var);
            if (std::fabs(tr.value_c) > kNoise * (std::fabs(delta) + tr.stderr_)) tr.relative_delta = delta / tr.value_c;
            tr.z = var == 0 ? 0 : delta / tr.stderr_;
            tr.p_value = var == 0 ? 1 : std::min(1.0, std::erfc(std::fabs(tr.z) / std::sqrt(2.0)));
            tr.ci_low = delta - 1.959964 * tr.stderr_;
            tr.ci_high = delta + 1.959964 * tr.stderr_;
            row.test = tr;
          }
        }
        sc.rows.push_back(std::move(row));
      }
    }
  }
  return sc;
}

}  // namespace metriq
