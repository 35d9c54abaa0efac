#pragma once

#include <vector>

#include "doctest.h"
#include "ipslab/error.hpp"
#include "ipslab/sampling.hpp"

#define CHECK_CODE(expr, ecode)                           \
  do {                                                    \
    bool thrown_ = false;                                 \
    try {                                                 \
      (void)(expr);                                       \
    } catch (const ipslab::Error& e_) {                   \
      thrown_ = true;                                     \
      CHECK_MESSAGE(e_.code() == (ecode), e_.what());     \
    }                                                     \
    CHECK_MESSAGE(thrown_, "expected " #ecode);           \
  } while (0)

inline std::vector<ipslab::FunctionOnOmega> randoms(std::size_t n_states, std::size_t count,
                                                   std::uint64_t seed = 11) {
  return ipslab::gaussian_functions(n_states, count, seed);
}
