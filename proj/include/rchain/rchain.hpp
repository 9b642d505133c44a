#ifndef RCHAIN_RCHAIN_HPP
#define RCHAIN_RCHAIN_HPP

#include "rchain/compensated.hpp"
#include "rchain/disk_billiard.hpp"
#include "rchain/error.hpp"
#include "rchain/length_analysis.hpp"
#include "rchain/parallel.hpp"
#include "rchain/polynomial.hpp"
#include "rchain/schottky.hpp"
#include "rchain/spectral.hpp"
#include "rchain/zeta.hpp"

#endif  // RCHAIN_RCHAIN_HPP
