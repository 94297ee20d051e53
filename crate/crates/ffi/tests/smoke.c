#include <stdio.h>
#include <stdlib.h>

#include "capsched.h"

static const char *INSTANCE =
    "{\"machines\": 2, \"jobs\": ["
    "{\"id\": \"a\", \"p\": 2, \"d\": 0.5, \"w\": 1},"
    "{\"id\": \"b\", \"p\": 1, \"d\": 0.7, \"w\": 3},"
    "{\"id\": \"c\", \"p\": 3, \"d\": 0.2, \"w\": 2}]}";

int main(void) {
    CapschedInstance *inst = NULL;
    CapschedSchedule *sched = NULL;
    double cost = 0.0;
    bool feasible = false;
    char *json = NULL;

    if (capsched_instance_from_json(INSTANCE, &inst) != CAPSCHED_STATUS_OK) {
        fprintf(stderr, "parse: %s\n", capsched_last_error());
        return 1;
    }
    if (capsched_schedule_run(inst, CAPSCHED_ALGORITHM_WSVF, 0, 0.0, &sched) != CAPSCHED_STATUS_OK) {
        fprintf(stderr, "run: %s\n", capsched_last_error());
        return 1;
    }
    if (capsched_schedule_cost(sched, &cost) != CAPSCHED_STATUS_OK) return 1;
    if (capsched_schedule_check_feasibility(sched, &feasible) != CAPSCHED_STATUS_OK || !feasible) return 1;
    if (capsched_schedule_to_json(sched, &json) != CAPSCHED_STATUS_OK) return 1;
    if (capsched_instance_from_json("[]", &inst) != CAPSCHED_STATUS_PARSE) return 1;

    printf("cost %.6f\n", cost);
    capsched_string_free(json);
    capsched_schedule_free(sched);
    return 0;
}
