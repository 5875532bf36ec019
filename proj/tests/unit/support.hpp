#pragma once

#include <gtest/gtest.h>

#include "atlas/error.hpp"

#define EXPECT_ERRC(statement, errc)                                     \
  do {                                                                   \
    try {                                                                \
      statement;                                                         \
      ADD_FAILURE() << "expected " #errc ", nothing was thrown";         \
    } catch (const atlas::Error& e) {                                    \
      EXPECT_EQ(e.code(), atlas::Errc::errc) << e.what();                \
    }                                                                    \
  } while (false)
