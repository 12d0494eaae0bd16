#pragma once

#include <stdexcept>
#include <string>

#include "ctms/ast.hpp"
#include "ctms/source_loc.hpp"

namespace ctms {

// Lexical, syntax, or well-formedness error with source position.
struct ParseError : std::runtime_error {
  SourceLoc loc;
  ParseError(SourceLoc l, const std::string& msg)
      : std::runtime_error(l.str() + ": " + msg), loc(l) {}
};

bool is_reserved_word(const std::string& s);

// Parses a .ct source text:
//   param decls, "requires <layout>;", statement list, "ensures <layout>".
// Runs check_well_formed before returning; throws ParseError on any failure.
Program parse(const std::string& source);
Program parse_file(const std::string& path);

// Static sanity rules (distinct layout idents, size/array variables never
// assigned, iterators never reassigned or used outside their loop, opaque
// footprints restricted to plain scalars and declared frames, ...).
// Throws ParseError; usable on programmatically built ASTs too.
void check_well_formed(const Program& p);

}  // namespace ctms
