#pragma once

#include <doctest.h>

#include "pnet/core/error.hpp"

// Expects `expr` to throw pnet::Error with the given code.
#define CHECK_ERROR_CODE(expr, expected)                                                   \
  do {                                                                                     \
    bool thrown_ = false;                                                                  \
    try {                                                                                  \
      (void)(expr);                                                                        \
    } catch (const pnet::Error& e_) {                                                      \
      thrown_ = true;                                                                      \
      CHECK_MESSAGE(e_.code() == (expected),                                               \
                    "got " << pnet::error_name(e_.code()) << ": " << e_.what());           \
    }                                                                                      \
    CHECK_MESSAGE(thrown_, "expected " << pnet::error_name(expected) << " from " #expr);   \
  } while (0)
