"""Hybrid A* planner deciding relocation-free exit maneuvers."""

from .hybrid_astar import (GoalRegion, OccupiedStart, Path, PlannerParams, SearchResult,
                           UnknownStall, Waypoint, parked_poses, parked_vehicle, plan,
                           resolve_entrance, search, stall_exit_query)

__all__ = [
    "GoalRegion", "OccupiedStart", "Path", "PlannerParams", "SearchResult", "UnknownStall",
    "Waypoint", "parked_poses", "parked_vehicle", "plan", "resolve_entrance", "search",
    "stall_exit_query",
]
