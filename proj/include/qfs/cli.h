// Copyright 2026 The qfselect Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end:
//
//   qfselect <calibrate|build-ranks|label|train|compress|evaluate|demo> ...
//
// Exit status 0 on success, 2 on usage errors (usage goes to stderr) and 1
// on runtime failures, reported as one line:
//   error: code=<Code> message="<text>"
// Progress lines go to stderr; artifacts are written atomically.

#ifndef QFS_CLI_H_
#define QFS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace qfs {

// args[0] is the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace qfs

#endif  // QFS_CLI_H_
