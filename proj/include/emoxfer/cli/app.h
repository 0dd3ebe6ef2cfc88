// Copyright (c) 2026 The emoxfer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EMOXFER_CLI_APP_H_
#define EMOXFER_CLI_APP_H_

#include <iosfwd>

namespace emoxfer::cli {

// Parses the command line and runs one command. Artifacts go to the
// command's output path; progress and errors go to |err|, help to |out|.
// Returns 0 on success, 1 on a runtime failure and the parser's code on
// a usage error.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace emoxfer::cli

#endif  // EMOXFER_CLI_APP_H_
