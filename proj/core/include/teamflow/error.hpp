#pragma once
// Error codes shared across the library.

#include <stdexcept>
#include <string>
#include <vector>

namespace teamflow {

enum class Errc {
    malformed_document,
    invalid_field,
    no_solo_guesses,
    too_few_guesses,
    size_under_two,
    no_turns,
    single_class_labels,
    unsplittable_corpus,
    no_events,
    invalid_mix,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

// Raised by parse_game_record; carries one entry per violated field.
class ValidationError : public Error {
public:
    ValidationError(Errc code, std::string message, std::vector<std::string> field_errors)
        : Error(code, std::move(message)), field_errors_(std::move(field_errors)) {}

    const std::vector<std::string>& field_errors() const { return field_errors_; }

private:
    std::vector<std::string> field_errors_;
};

} // namespace teamflow
