#include "hacover/types.hpp"

#include "hacover/error.hpp"

namespace hacover {

std::string to_string(LossType type) {
    switch (type) {
        case LossType::unilateral: return "unilateral";
        case LossType::bilateral: return "bilateral";
    }
    throw parameter_error("invalid loss type value");
}

std::string to_string(FitType type) {
    switch (type) {
        case FitType::uni_left: return "uni_left";
        case FitType::uni_right: return "uni_right";
        case FitType::bi_left: return "bi_left";
        case FitType::bi_right: return "bi_right";
    }
    throw parameter_error("invalid fit type value");
}

std::string to_string(Sex sex) {
    switch (sex) {
        case Sex::male: return "male";
        case Sex::female: return "female";
    }
    throw parameter_error("invalid sex value");
}

LossType loss_type_from_string(const std::string& text) {
    if (text == "unilateral") return LossType::unilateral;
    if (text == "bilateral") return LossType::bilateral;
    throw validation_error("unknown loss type: \"" + text + "\"");
}

FitType fit_type_from_string(const std::string& text) {
    if (text == "uni_left") return FitType::uni_left;
    if (text == "uni_right") return FitType::uni_right;
    if (text == "bi_left") return FitType::bi_left;
    if (text == "bi_right") return FitType::bi_right;
    throw validation_error("unknown fit type: \"" + text + "\"");
}

Sex sex_from_string(const std::string& text) {
    if (text == "male") return Sex::male;
    if (text == "female") return Sex::female;
    throw validation_error("unknown sex: \"" + text + "\"");
}

}  // namespace hacover
