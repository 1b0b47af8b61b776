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

#pragma once

#include <string>
#include <vector>

#include "metriq/plan/plan.hpp"

namespace metriq::testing {

struct LabeledMetric {
  std::string expr;
  plan::Estimator expected;
};

/// Metrics over the website schema, randomized by User, with their correct
/// variance estimator. The first entries are the two worked classifications:
/// average revenue per user is an independent per-user sample, average page
/// load time is a per-page metric whose pages cluster within users.
inline const std::vector<LabeledMetric>& estimator_corpus() {
  using plan::Estimator;
  static const std::vector<LabeledMetric> corpus = {
      {"Avg(Sum<User>(Revenue))", Estimator::Standard},
      {"Avg(PageLoadTime)", Estimator::DeltaRatio},
      {"Avg(Count<User>())", Estimator::Standard},
      {"Avg(Count<User>(PageLoadTime))", Estimator::Standard},
      {"Avg(Max<User>(PageLoadTime))", Estimator::Standard},
      {"Avg(Min<User>(Revenue))", Estimator::Standard},
      {"Avg(Avg<User>(PageLoadTime))", Estimator::Standard},
      {"Avg(Sum<User>(Revenue if Country == \"US\"))", Estimator::Standard},
      {"Avg(Sum<User>(Revenue * 2 + 1))", Estimator::Standard},
      {"Avg(Revenue)", Estimator::DeltaRatio},
      {"Avg(PageLoadTime if Browser == \"Chrome\")", Estimator::DeltaRatio},
      {"Avg(if Revenue == null then 0 else Revenue)", Estimator::DeltaRatio},
      {"Avg(PageLoadTime / 1000)", Estimator::DeltaRatio},
      {"Avg(Revenue if PageLoadTime > 2)", Estimator::DeltaRatio},
      {"Avg(if PageLoadTime > 3 then 1 else 0)", Estimator::DeltaRatio},
      {"Percentile(PageLoadTime, 95)", Estimator::Unsupported},
      {"Percentile(PageLoadTime, 50)", Estimator::Unsupported},
      {"Max(PageLoadTime)", Estimator::Unsupported},
      {"Min(Revenue)", Estimator::Unsupported},
      {"Percentile(Sum<User>(Revenue), 50)", Estimator::Unsupported},
      {"Max(Sum<User>(Revenue))", Estimator::Unsupported},
      {"Min(Count<User>())", Estimator::Unsupported},
      {"Avg(Sum<Market>(Revenue))", Estimator::Unsupported},
  };
  return corpus;
}

/// Metric-set source declaring corpus entry i as metric `M<i>`.
inline std::string corpus_source() {
  std::string src = "unit User = User;\nunit Market = Country;\n";
  const auto& c = estimator_corpus();
  for (std::size_t i = 0; i < c.size(); ++i) src += "metric M" + std::to_string(i) + " = " + c[i].expr + ";\n";
  return src;
}

}  // namespace metriq::testing
