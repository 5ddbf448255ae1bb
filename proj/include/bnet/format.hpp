#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace bnet {

/// Fixed-point text with `decimals` digits after the point. The value is first cut to 15
/// significant digits and then rounded half away from zero, so 0.075 prints as 0.08 and
/// 0.125 as 0.13 despite their binary representations.
inline std::string format_fixed(double x, int decimals) {
    char buf[64];
    if (!std::isfinite(x)) {
        std::snprintf(buf, sizeof buf, "%f", x);
        return buf;
    }
    const bool negative = std::signbit(x);
    std::snprintf(buf, sizeof buf, "%.14e", std::abs(x));
    std::string digits;
    const char* p = buf;
    for (; *p && *p != 'e'; ++p)
        if (*p != '.') digits.push_back(*p);
    const int exponent = std::atoi(p + 1);

    // digits[i] carries weight 10^(exponent - i); keep up to weight 10^-decimals.
    const int last = exponent + decimals;
    std::string kept;
    bool round_up = false;
    if (last >= 0) {
        for (int i = 0; i <= last; ++i)
            kept.push_back(i < static_cast<int>(digits.size()) ? digits[static_cast<std::size_t>(i)] : '0');
        round_up = last + 1 < static_cast<int>(digits.size()) && digits[static_cast<std::size_t>(last + 1)] >= '5';
    } else {
        kept = "0";
        round_up = last == -1 && digits[0] >= '5';
    }
    if (round_up) {
        int i = static_cast<int>(kept.size()) - 1;
        while (i >= 0 && kept[static_cast<std::size_t>(i)] == '9') kept[static_cast<std::size_t>(i--)] = '0';
        if (i < 0)
            kept.insert(kept.begin(), '1');
        else
            ++kept[static_cast<std::size_t>(i)];
    }
    // kept is now the integer round(|x| * 10^decimals)
    if (kept.size() < static_cast<std::size_t>(decimals) + 1)
        kept.insert(0, static_cast<std::size_t>(decimals) + 1 - kept.size(), '0');
    std::string out = kept.substr(0, kept.size() - static_cast<std::size_t>(decimals));
    if (decimals > 0) out += "." + kept.substr(kept.size() - static_cast<std::size_t>(decimals));
    const bool zero = kept.find_first_not_of('0') == std::string::npos;
    return negative && !zero ? "-" + out : out;
}

}  // namespace bnet
