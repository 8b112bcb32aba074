#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace semhier {

using WarningSink = std::function<void(std::string_view)>;

// Route library warnings somewhere other than stderr. Passing an empty
// function restores the default. Returns the previous sink.
WarningSink set_warning_sink(WarningSink sink);

void warn(std::string_view message);

// Collects warnings for the lifetime of the object, then restores the
// previous sink.
class WarningCapture {
public:
    WarningCapture();
    ~WarningCapture();
    WarningCapture(const WarningCapture&) = delete;
    WarningCapture& operator=(const WarningCapture&) = delete;

    const std::vector<std::string>& messages() const { return messages_; }
    bool contains(std::string_view needle) const;

private:
    std::vector<std::string> messages_;
    WarningSink previous_;
};

}  // namespace semhier
