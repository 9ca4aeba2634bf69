#pragma once

#include <string>

namespace iconrag {

/// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ". When SOURCE_DATE_EPOCH is set
/// it is used instead of the wall clock, for reproducible outputs.
std::string utc_timestamp();

}  // namespace iconrag
