#pragma once

// Malformed .bnet inputs, each with the line its error must be reported on.

#include <cstddef>
#include <string>
#include <vector>

namespace bnet::testing {

struct MalformedCase {
    std::string name;
    std::string text;
    std::size_t line;
    std::string message_part;
};

inline std::vector<MalformedCase> malformed_cases() {
    const std::string head = "var F : 0 1\nvar Q : a b c\nprior F = [ 1 1 ]\n";
    return {
        {"empty input", "", 1, "no variables declared"},
        {"only comments", "# nothing\n\n", 1, "no variables declared"},
        {"unknown keyword", "var F : 0 1\nnode X\n", 2, "unknown token 'node'"},
        {"stray punctuation", "var F : 0 1\n]\n", 2, "unknown token"},
        {"missing colon", "var F 0 1\n", 1, "expected ':'"},
        {"one state", "var F : 0\nprior F = [ 1 ]\n", 1, "at least 2 states"},
        {"duplicate state", "var F : 0 0\n", 1, "duplicate state"},
        {"duplicate variable", "var F : 0 1\nvar F : 0 1\n", 2, "duplicate declaration"},
        {"bad role", "var F : 0 1 @respondent\n", 1, "unknown role"},
        {"unterminated string", "var F : \"low 1\n", 1, "unterminated string"},
        {"undeclared child", head + "cpt G | F = [ 1 1 ; 1 1 ]\n", 4, "undeclared variable 'G'"},
        {"undeclared parent", head + "cpt Q | G = [ 1 1 1 ]\n", 4, "undeclared variable 'G'"},
        {"short row", head + "cpt Q | F = [\n 1 1 1 ;\n 1 1 1 1\n]\n", 6, "row 2 has 4 entries, expected 3"},
        {"missing row", head + "cpt Q | F = [\n 1 1 1\n]\n", 6, "has 1 rows, expected 2"},
        {"too many rows", head + "cpt Q | F = [ 1 1 1 ; 1 1 1 ; 1 1 1 ]\n", 4, "has 3 rows, expected 2"},
        {"negative entry", head + "cpt Q | F = [ 1 1 1 ;\n 1 -1 1 ]\n", 5, "negative probability"},
        {"not a number", head + "cpt Q | F = [ 1 1 1 ; 1 x 1 ]\n", 4, "invalid number 'x'"},
        {"all-zero row", head + "cpt Q | F = [ 1 1 1 ;\n 0 0 0 ]\n", 5, "row 2 is all zeros"},
        {"unterminated table", head + "cpt Q | F = [ 1 1 1 ;\n 1 1 1\n", 6, "unterminated table"},
        {"missing table", head, 2, "variable 'Q' has no table"},
        {"duplicate table", head + "prior F = [ 1 1 ]\n", 4, "duplicate table"},
        {"prior with parents", head + "prior Q | F = [ 1 1 1 ; 1 1 1 ]\n", 4, "cannot have parents"},
        {"cycle", "var A : 0 1\nvar B : 0 1\ncpt A | B = [ 1 1 ; 1 1 ]\ncpt B | A = [ 1 1 ; 1 1 ]\n", 4,
         "cycle"},
    };
}

}  // namespace bnet::testing
