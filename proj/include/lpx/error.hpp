#pragma once

#include <stdexcept>
#include <string>

namespace lpx {

enum class errc {
    parse_error,
    dimension_mismatch,
    singular_matrix,
    non_commuting,
    irrational_spectrum,
    not_nilpotent,
    not_solvable,
    not_semidirect,
    not_applicable,
    unknown_case,
    solvability_failed,
    coext_condition_failed,
    index_out_of_range,
    not_semisimple,
    non_finite,
    bad_parameter,
    all_resonant,
    internal
};

inline const char* errc_name(errc c)
{
    switch (c) {
    case errc::parse_error: return "ParseError";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::singular_matrix: return "SingularMatrix";
    case errc::non_commuting: return "NonCommuting";
    case errc::irrational_spectrum: return "IrrationalSpectrum";
    case errc::not_nilpotent: return "NotNilpotent";
    case errc::not_solvable: return "NotSolvable";
    case errc::not_semidirect: return "NotSemidirect";
    case errc::not_applicable: return "NotApplicable";
    case errc::unknown_case: return "UnknownCase";
    case errc::solvability_failed: return "SolvabilityFailed";
    case errc::coext_condition_failed: return "CoextConditionFailed";
    case errc::index_out_of_range: return "IndexOutOfRange";
    case errc::not_semisimple: return "NotSemisimple";
    case errc::non_finite: return "NonFinite";
    case errc::bad_parameter: return "BadParameter";
    case errc::all_resonant: return "AllResonant";
    case errc::internal: return "Internal";
    }
    return "Unknown";
}

class error : public std::runtime_error {
public:
    error(errc c, const std::string& what)
        : std::runtime_error(std::string(errc_name(c)) + ": " + what), code_(c) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

} // namespace lpx
