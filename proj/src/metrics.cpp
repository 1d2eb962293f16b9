// Copyright 2026 The exitbench Authors
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

#include "exitbench/metrics.hpp"

#include <cstdio>

#include "exitbench/error.hpp"

namespace exitbench {
namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

}  // namespace

ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw DataError("prediction count " + std::to_string(predictions.size()) +
                    " does not match label count " + std::to_string(labels.size()));
  }
  if (labels.empty()) throw DataError("cannot score an empty prediction set");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int p = predictions[i];
    const int y = labels[i];
    if ((p != 0 && p != 1) || (y != 0 && y != 1)) throw DataError("labels must be 0 or 1");
    if (p && y) {
      ++cm.tp;
    } else if (p && !y) {
      ++cm.fp;
    } else if (!p && y) {
      ++cm.fn;
    } else {
      ++cm.tn;
    }
  }
  return cm;
}

ClassificationReport report(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw DataError("cannot report on an empty confusion matrix");
  ClassificationReport r;
  r.confusion = cm;
  r.accuracy = ratio(cm.tp + cm.tn, cm.total());
  r.precision = ratio(cm.tp, cm.tp + cm.fp);
  r.recall = ratio(cm.tp, cm.tp + cm.fn);
  r.f1_positive = harmonic(r.precision, r.recall);
  r.f1_negative = harmonic(ratio(cm.tn, cm.tn + cm.fn), ratio(cm.tn, cm.tn + cm.fp));
  r.f1_macro = 0.5 * (r.f1_positive + r.f1_negative);
  r.support_positive = cm.tp + cm.fn;
  r.support_negative = cm.tn + cm.fp;
  return r;
}

nlohmann::ordered_json ClassificationReport::to_json() const {
  return {{"accuracy", accuracy},
          {"precision", precision},
          {"recall", recall},
          {"f1", f1_positive},
          {"f1_positive", f1_positive},
          {"f1_negative", f1_negative},
          {"f1_macro", f1_macro},
          {"support", {{"positive", support_positive}, {"negative", support_negative}}},
          {"confusion", {{"tp", confusion.tp}, {"fp", confusion.fp}, {"tn", confusion.tn},
                         {"fn", confusion.fn}}}};
}

std::string ClassificationReport::to_table() const {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "metric         value\n"
                "accuracy       %.4f\n"
                "precision      %.4f\n"
                "recall         %.4f\n"
                "f1 (positive)  %.4f\n"
                "f1 (macro)     %.4f\n"
                "support        %zu positive / %zu negative\n"
                "confusion      tp=%zu fp=%zu tn=%zu fn=%zu\n",
                accuracy, precision, recall, f1_positive, f1_macro, support_positive,
                support_negative, confusion.tp, confusion.fp, confusion.tn, confusion.fn);
  return buf;
}

}  // namespace exitbench
