#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "nambd/geometry.hpp"

namespace nambd::spacepi {

struct SourceLoc {
    int line = 0;
    int col = 0;
};

struct ParseError : std::runtime_error {
    SourceLoc loc;
    ParseError(const std::string& msg, SourceLoc where)
        : std::runtime_error(msg + " (line " + std::to_string(where.line) + ", col " +
                             std::to_string(where.col) + ")"),
          loc(where) {}
};

struct SyntaxError : ParseError {
    using ParseError::ParseError;
};
struct UndeclaredName : ParseError {
    using ParseError::ParseError;
};
struct DuplicateDeclaration : ParseError {
    using ParseError::ParseError;
};
struct MissingSection : ParseError {
    using ParseError::ParseError;
};

struct NotNamShaped : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A length appearing in an expression: numeric literal or the name of a
// radius declaration.
struct RadiusRef {
    std::optional<double> literal;
    std::string name;  // set iff literal is absent

    bool operator==(const RadiusRef&) const = default;
};

struct FixedPosition {
    double x, y, z;
    bool operator==(const FixedPosition&) const = default;
};

// rand(x,y,z) s.t. (x^2 + y^2 + z^2) = R
struct SphereRand {
    RadiusRef radius;
    bool operator==(const SphereRand&) const = default;
};

using PositionExpr = std::variant<FixedPosition, SphereRand>;

struct PositionDecl {
    std::string name;
    PositionExpr expr;
    bool operator==(const PositionDecl&) const = default;
};

struct RadiusDecl {
    std::string name;
    double value;
    bool operator==(const RadiusDecl&) const = default;
};

// name() := x'^2 + y'^2 + z'^2 < R [, x = P(x) ^ y = P(y) ^ z = P(z) otherwise]
struct MotionDecl {
    std::string name;
    RadiusRef bound;
    std::string escape_position;  // empty if no otherwise-branch
    bool operator==(const MotionDecl&) const = default;
};

struct Action {
    std::string channel;
    bool send;  // ch!(~, r) vs ch?(~, r)
    RadiusRef radius;
    bool operator==(const Action&) const = default;
};

// Process term tree covering the SpacePi grammar: action-prefixed sums,
// parallel composition, name restriction, nil.
struct ProcessTerm {
    enum class Kind { Nil, PrefixSum, Parallel, New };
    Kind kind = Kind::Nil;
    std::vector<Action> actions;             // PrefixSum: one per alternative
    std::vector<ProcessTerm> continuations;  // PrefixSum: per alternative; Parallel: children; New: single body
    std::string new_name;                    // New only

    bool operator==(const ProcessTerm&) const = default;
};

struct ProcessDef {
    std::string name;
    std::string motion;  // empty if the process does not move
    ProcessTerm body;
    bool operator==(const ProcessDef&) const = default;
};

struct ModelDocument {
    std::vector<PositionDecl> positions;
    std::vector<RadiusDecl> radii;
    std::string pmf_name = "f_pmf";
    std::optional<std::string> pmf_expr;  // absent means "not defined"
    std::vector<MotionDecl> motions;
    std::vector<ProcessDef> processes;
    std::vector<std::string> initial;

    bool operator==(const ModelDocument&) const = default;

    double resolve_radius(const RadiusRef& ref) const;
};

// Parses the six ordered sections of a .spi model file. '#' starts a line
// comment. Throws the diagnostic types above with source locations.
ModelDocument parse_model(const std::string& text);

// Canonical text form; parse_model(format_model(doc)) == doc.
std::string format_model(const ModelDocument& doc);

struct LoweredModel {
    NamGeometry geometry;
    SimulatorConfig defaults;
};

// Extracts (a, b, q) from a NAM-shaped document: a from the channel action
// radius, b from the moving process's sphere, q from the exit process's
// sphere. D is supplied externally (the model text carries no diffusion
// coefficient). The i-th process definition is bound to the i-th position
// declaration. Rejects anything outside the NAM shape with NotNamShaped.
LoweredModel lower_to_nam(const ModelDocument& doc, double D);

}  // namespace nambd::spacepi
