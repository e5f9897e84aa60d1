#pragma once

#define RELICMP_VERSION "0.1.0"
