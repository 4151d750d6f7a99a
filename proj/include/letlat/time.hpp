#ifndef LETLAT_TIME_HPP
#define LETLAT_TIME_HPP

#include <cstdint>
#include <numeric>

namespace letlat {

// discrete time; one tick is whatever the task set's tick_unit says
using tick_t = std::int64_t;

// floor(a / b) for b > 0, correct for negative a
constexpr tick_t floor_div(tick_t a, tick_t b)
{
	tick_t q = a / b;
	if ((a % b != 0) && (a < 0))
		--q;
	return q;
}

// ceil(a / b) for b > 0, correct for negative a
constexpr tick_t ceil_div(tick_t a, tick_t b)
{
	tick_t q = a / b;
	if ((a % b != 0) && (a > 0))
		++q;
	return q;
}

constexpr tick_t lcm(tick_t a, tick_t b)
{
	return std::lcm(a, b);
}

} // namespace letlat

#endif
