#pragma once

#include <functional>
#include <string>

namespace nerkit {

using WarningSink = std::function<void(const std::string&)>;

/// Non-fatal diagnostics. Defaults to standard error; tests swap the sink to
/// capture messages. Returns the previous sink.
WarningSink set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace nerkit
