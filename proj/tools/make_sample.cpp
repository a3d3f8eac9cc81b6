// Writes the synthetic loan-level sample: fairprice_make_sample OUT.csv [ROWS] [SEED]

#include "fairprice/calibration.hpp"

#include <fstream>
#include <iostream>
#include <string>

int main(int argc, char** argv)
{
  if (argc < 2) {
    std::cerr << "usage: fairprice_make_sample OUT.csv [ROWS] [SEED]\n";
    return 2;
  }
  fairprice::SyntheticLoanSpec spec;
  std::uint64_t seed = 2022;
  try {
    if (argc > 2) spec.rows = std::stoul(argv[2]);
    if (argc > 3) seed = std::stoull(argv[3]);
  } catch (const std::exception&) {
    std::cerr << "ROWS and SEED must be non-negative integers\n";
    return 2;
  }
  std::ofstream out(argv[1], std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << argv[1] << '\n';
    return 2;
  }
  fairprice::write_loans_csv(out, fairprice::generate_synthetic_loans(spec, seed));
  return 0;
}
