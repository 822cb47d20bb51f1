#include "defectgeo/errors.hpp"

#include <sstream>

namespace defectgeo {

namespace {

std::string parse_message(std::size_t offset, const std::string& expected, const std::string& input)
{
    std::ostringstream os;
    os << "parse error at offset " << offset << ": expected " << expected << " in \"" << input << "\"";
    return os.str();
}

std::string evaluation_message(const std::string& what, double x, double y, double z, double t)
{
    std::ostringstream os;
    os.precision(17);
    os << what << " at (x=" << x << ", y=" << y << ", z=" << z << ", t=" << t << ")";
    return os.str();
}

std::string scenario_message(const std::string& what, std::size_t line)
{
    if (line == 0) return what;
    return "line " + std::to_string(line) + ": " + what;
}

}  // namespace

ParseError::ParseError(std::size_t offset, std::string expected, const std::string& input)
    : Error(parse_message(offset, expected, input)), offset_(offset), expected_(std::move(expected))
{
}

EvaluationError::EvaluationError(const std::string& what, double x_, double y_, double z_, double t_)
    : Error(evaluation_message(what, x_, y_, z_, t_)), x(x_), y(y_), z(z_), t(t_)
{
}

ScenarioError::ScenarioError(const std::string& what, std::size_t line)
    : Error(scenario_message(what, line)), line_(line)
{
}

}  // namespace defectgeo
