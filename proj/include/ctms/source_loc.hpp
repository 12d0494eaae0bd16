#pragma once

#include <string>

namespace ctms {

// 1-based position in a .ct source file; line == 0 means "synthesized node".
struct SourceLoc {
  int line = 0;
  int col = 0;

  bool known() const { return line > 0; }
  std::string str() const {
    if (!known()) return "<synth>";
    return std::to_string(line) + ":" + std::to_string(col);
  }
};

}  // namespace ctms
