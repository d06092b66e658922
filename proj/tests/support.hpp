#pragma once

#include <cstdlib>
#include <map>
#include <memory>
#include <string>

#include "eratray/prime_table.hpp"

#ifndef ERATRAY_TEST_DATA_DIR
#define ERATRAY_TEST_DATA_DIR "tests/data"
#endif

namespace testsupport {

// One table per bound per binary; construction dominates test runtime.
inline const eratray::PrimeTable& table(eratray::u64 bound) {
  static std::map<eratray::u64, std::unique_ptr<eratray::PrimeTable>> cache;
  auto it = cache.find(bound);
  if (it == cache.end()) {
    auto t = std::make_unique<eratray::PrimeTable>(
        eratray::PrimeTable::build(bound));
    it = cache.emplace(bound, std::move(t)).first;
  }
  return *it->second;
}

inline std::string data_path(const std::string& name) {
  return std::string(ERATRAY_TEST_DATA_DIR) + "/" + name;
}

}  // namespace testsupport
