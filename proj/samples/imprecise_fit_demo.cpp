// Fits a precise model, a midpoint model and an imprecise model set to an
// intervalized synthetic dataset and prints the probability envelope.

#include <cstdio>

#include "ilr/ilr.hpp"

int main() {
  using namespace ilr;
  const Coefficients truth({-5.0, 1.0});
  const Dataset precise = synthesize(50, 7, truth, Interval(0.0, 10.0));
  const Dataset censored = intervalize(precise, CensorMode::symmetric, 0.375, 8);

  const FitResult base = fit_mle(precise);
  const FitResult mid = fit_mle(collapse(censored, CollapseStrategy::midpoint));
  const ModelSet ms = fit_imprecise(censored);

  std::printf("%zu candidate models\n", ms.size());
  std::printf("%6s %10s %10s %10s %10s\n", "x", "base", "midpoint", "lower", "upper");
  for (double x : feature_grid(censored, 11)) {
    const double xs[] = {x};
    const Interval p = predict_interval(ms, xs);
    std::printf("%6.2f %10.4f %10.4f %10.4f %10.4f\n", x, predict_proba(base.coefficients, xs),
                predict_proba(mid.coefficients, xs), p.lo(), p.hi());
  }
}
