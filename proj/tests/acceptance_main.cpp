#include <iostream>

#include "wt/report.hpp"
#include "wt/selftest.hpp"

int main() {
  wt::SelftestResult r = wt::run_selftest(std::cout, wt::Tolerances{});
  return r.ok() ? 0 : 1;
}
