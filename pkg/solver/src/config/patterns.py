"""Line patterns for the sectioned key-value config format."""

import re
from typing import Optional, Tuple


class PatternMatcher:
    """Recognizes section headers and assignments in normalized config lines."""

    SECTION_PATTERN = r'^\[\s*([A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z0-9_]+)*)\s*\]$'
    ASSIGNMENT_PATTERN = r'^([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*)$'

    @staticmethod
    def match_pattern(text: str, pattern: str) -> Optional[re.Match]:
        """
        Match a regex pattern against the whole line.

        Args:
            text: Normalized line
            pattern: Regex pattern

        Returns:
            Match object if found, None otherwise
        """
        return re.match(pattern, text)

    @staticmethod
    def match_section(text: str) -> Optional[str]:
        """
        Match a section header such as '[potential.members.0]'.

        Args:
            text: Normalized line

        Returns:
            Dotted section path, or None if the line is not a header
        """
        match = PatternMatcher.match_pattern(text, PatternMatcher.SECTION_PATTERN)
        if match:
            return match.group(1).lower()
        return None

    @staticmethod
    def match_assignment(text: str) -> Optional[Tuple[str, str]]:
        """
        Match a 'key = value' assignment.

        Args:
            text: Normalized line

        Returns:
            Tuple of (key, raw value text), or None if the line is not an assignment
        """
        match = PatternMatcher.match_pattern(text, PatternMatcher.ASSIGNMENT_PATTERN)
        if match and match.group(2).strip():
            return (match.group(1).lower(), match.group(2).strip())
        return None
