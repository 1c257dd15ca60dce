"""Text normalization utilities for the sectioned config format."""

import re
from typing import List, Union

Scalar = Union[bool, int, float, str]


class TextProcessor:
    """Handles line normalization, value splitting and literal conversion."""

    COMMENT_CHARS = ('#', ';')
    NUMBER = re.compile(r'^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$')
    INTEGER = re.compile(r'^[+-]?\d+$')

    @staticmethod
    def normalize(line: str) -> str:
        """
        Normalize a config line.

        Args:
            line: Raw line text

        Returns:
            Line with comments removed, whitespace collapsed and trimmed
        """
        if not line:
            return ""

        for marker in TextProcessor.COMMENT_CHARS:
            index = line.find(marker)
            if index >= 0:
                line = line[:index]

        line = re.sub(r'\s+', ' ', line)
        return line.strip()

    @staticmethod
    def split_list(text: str) -> List[str]:
        """
        Split a comma-separated value into trimmed items.

        Args:
            text: Value text

        Returns:
            Non-empty items in order
        """
        return [item.strip() for item in text.split(',') if item.strip()]

    @staticmethod
    def to_scalar(token: str) -> Scalar:
        """
        Convert one token to bool, int, float or str.

        Args:
            token: Trimmed token

        Returns:
            Converted literal
        """
        lowered = token.lower()
        if lowered in ('true', 'yes', 'on'):
            return True
        if lowered in ('false', 'no', 'off'):
            return False
        if TextProcessor.INTEGER.match(token):
            return int(token)
        if TextProcessor.NUMBER.match(token):
            return float(token)
        return token

    @staticmethod
    def to_value(text: str) -> Union[Scalar, List[Scalar]]:
        """
        Convert an assignment's right-hand side. Comma-separated text becomes a list.

        Args:
            text: Value text

        Returns:
            Scalar or list of scalars
        """
        if ',' in text:
            return [TextProcessor.to_scalar(item) for item in TextProcessor.split_list(text)]
        return TextProcessor.to_scalar(text.strip())

    @staticmethod
    def format_value(value) -> str:
        """
        Render a value back into config text.

        Args:
            value: Scalar or list of scalars

        Returns:
            Text that to_value parses back to the same value
        """
        if isinstance(value, (list, tuple)):
            return ', '.join(TextProcessor.format_value(v) for v in value)
        if isinstance(value, bool):
            return 'true' if value else 'false'
        if isinstance(value, float):
            text = repr(value)
            return text if ('.' in text or 'e' in text or 'n' in text) else text + '.0'
        return str(value)
