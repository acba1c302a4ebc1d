#pragma once

#include <span>

namespace seal {

// Mann-Whitney ROC-AUC: probability a positive score exceeds a negative one,
// with half credit for ties. Computed via sorted ranks in O((m+n) log(m+n)).
double roc_auc(std::span<const double> positive_scores,
               std::span<const double> negative_scores);

double normal_cdf(double z);

}  // namespace seal
