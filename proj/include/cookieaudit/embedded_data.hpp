#pragma once

#include <string_view>

// Data files under data/ compiled into the library.
namespace cookieaudit::embedded {

std::string_view public_suffix_list();
std::string_view pi_rules();
std::string_view button_vocab();
std::string_view dict_english();
std::string_view dict_passwords();
std::string_view dict_tv_film();

}  // namespace cookieaudit::embedded
