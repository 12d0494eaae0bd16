#pragma once

#include <cstdlib>
#include <string>

#include "ctms/parse.hpp"

namespace ctms::test {

inline std::string corpus_dir() {
  const char* dir = std::getenv("CTMS_CORPUS_DIR");
  return dir ? dir : "corpus";
}

inline Program load_corpus(const std::string& name) {
  return parse_file(corpus_dir() + "/" + name);
}

}  // namespace ctms::test
